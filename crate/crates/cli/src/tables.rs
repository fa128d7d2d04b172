//! Reference transition tables and the `table-check` regression.

use gxy_core::variational::Method;
use gxy_core::{OrderType, TransitionReport};
use serde::Serialize;

/// One published row: `p`, transition temperature, order type, energy jump
/// and ordered-side magnetization (the last two for type I rows only).
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    pub p: u32,
    pub theta: f64,
    pub order: OrderType,
    pub delta_u: Option<f64>,
    pub m_bar: Option<f64>,
}

const fn row(p: u32, theta: f64, order: OrderType, delta_u: Option<f64>, m_bar: Option<f64>) -> ReferenceRow {
    ReferenceRow { p, theta, order, delta_u, m_bar }
}

/// Mean-field reference values for d = 3.
pub const MF_REFERENCE: [ReferenceRow; 10] = [
    row(5, 1.1082, OrderType::II, None, None),
    row(6, 1.0287, OrderType::I, None, None),
    row(7, 0.9741, OrderType::I, None, None),
    row(8, 0.9336, OrderType::I, None, None),
    row(9, 0.9019, OrderType::I, None, None),
    row(10, 0.8762, OrderType::I, None, None),
    row(11, 0.8548, OrderType::I, Some(1.2336), Some(0.7506)),
    row(12, 0.8366, OrderType::I, Some(1.3140), Some(0.7687)),
    row(16, 0.7836, OrderType::I, Some(1.5355), Some(0.7836)),
    row(20, 0.7486, OrderType::I, Some(1.6712), Some(0.8387)),
];

/// Two-site-cluster reference values for d = 3.
pub const TSC_REFERENCE: [ReferenceRow; 10] = [
    row(5, 1.1011, OrderType::II, None, None),
    row(6, 1.0416, OrderType::II, None, None),
    row(7, 0.9935, OrderType::II, None, None),
    row(8, 0.9537, OrderType::II, None, None),
    row(9, 0.9199, OrderType::II, None, None),
    row(10, 0.8907, OrderType::II, None, None),
    row(11, 0.8659, OrderType::I, Some(0.3242), Some(0.3994)),
    row(12, 0.8461, OrderType::I, Some(0.5437), Some(0.5098)),
    row(16, 0.7906, OrderType::I, Some(1.0097), Some(0.6721)),
    row(20, 0.7549, OrderType::I, Some(1.2578), Some(0.7374)),
];

/// MF magnetization cell that may be waived when both conventions miss it:
/// its reference value repeats the temperature column of the same row.
pub const MF_WAIVABLE_M_CELL: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pass,
    Fail,
    Waived,
}

impl std::fmt::Display for CellStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CellStatus::Pass => "PASS",
            CellStatus::Fail => "FAIL",
            CellStatus::Waived => "WAIVED",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub method: Method,
    pub p: u32,
    pub column: &'static str,
    pub reference: String,
    pub computed: String,
    pub relative_deviation: Option<f64>,
    pub tolerance: f64,
    pub status: CellStatus,
    pub note: String,
}

pub const CELL_CSV_HEADER: &str = "method,p,column,reference,computed,relative_deviation,tolerance,status,note";

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn numeric(method: Method, p: u32, column: &'static str, reference: f64, computed: Option<f64>, tol: f64) -> Cell {
    let dev = computed.map(|c| rel(c, reference));
    Cell {
        method,
        p,
        column,
        reference: format!("{reference}"),
        computed: computed.map(|c| format!("{c:.6}")).unwrap_or_default(),
        relative_deviation: dev,
        tolerance: tol,
        status: if dev.is_some_and(|d| d <= tol) { CellStatus::Pass } else { CellStatus::Fail },
        note: String::new(),
    }
}

/// Compares solver reports row by row. The magnetization cell passes under
/// whichever convention (order parameter or in-plane) is closer.
pub fn compare(
    reference: &[ReferenceRow],
    reports: &[TransitionReport],
    theta_tol: f64,
    jump_tol: f64,
    waivable: Option<u32>,
) -> Vec<Cell> {
    let mut cells = Vec::new();
    for (r, got) in reference.iter().zip(reports) {
        let method = got.method;
        cells.push(numeric(method, r.p, "theta_star", r.theta, Some(got.theta_star), theta_tol));
        cells.push(Cell {
            method,
            p: r.p,
            column: "type",
            reference: r.order.to_string(),
            computed: got.order_type.to_string(),
            relative_deviation: None,
            tolerance: 0.0,
            status: if r.order == got.order_type { CellStatus::Pass } else { CellStatus::Fail },
            note: String::new(),
        });
        if let Some(du) = r.delta_u {
            cells.push(numeric(method, r.p, "delta_u", du, got.delta_u, jump_tol));
        }
        if let Some(m) = r.m_bar {
            let candidates = [("m_bar_p", got.m_bar_p), ("m_bar_1", got.m_bar_1)];
            let (name, value) = candidates
                .into_iter()
                .filter(|(_, v)| v.is_some())
                .min_by(|a, b| rel(a.1.unwrap(), m).total_cmp(&rel(b.1.unwrap(), m)))
                .unwrap_or(("m_bar_p", None));
            let mut cell = numeric(method, r.p, "m_bar", m, value, jump_tol);
            cell.note = format!("closest convention {name}");
            if cell.status == CellStatus::Fail && waivable == Some(r.p) && jump_tol > 0.0 {
                cell.status = CellStatus::Waived;
                cell.note.push_str("; reference cell repeats the temperature column");
            }
            cells.push(cell);
        }
    }
    cells
}

pub fn cells_csv(cells: &[Cell]) -> String {
    let mut out = format!("{CELL_CSV_HEADER}\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.method,
            c.p,
            c.column,
            c.reference,
            c.computed,
            c.relative_deviation.map(|d| format!("{d:.3e}")).unwrap_or_default(),
            c.tolerance,
            c.status,
            c.note.replace(',', ";"),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use gxy_core::variational::Method;

    use super::*;

    fn report(p: u32, theta: f64, order: OrderType, du: Option<f64>, m: Option<f64>) -> TransitionReport {
        TransitionReport {
            method: Method::MeanField,
            p,
            theta_star: theta,
            theta_instability: theta,
            order_type: order,
            delta_u: du,
            m_bar_p: m.map(|m| m * 0.5),
            m_bar_1: m,
        }
    }

    #[test]
    fn exact_rows_pass() {
        let reports: Vec<_> = MF_REFERENCE.iter().map(|r| report(r.p, r.theta, r.order, r.delta_u, r.m_bar)).collect();
        let cells = compare(&MF_REFERENCE, &reports, 1e-3, 0.02, None);
        assert!(cells.iter().all(|c| c.status == CellStatus::Pass));
        assert!(cells.iter().filter(|c| c.column == "m_bar").all(|c| c.note.contains("m_bar_1")));
    }

    #[test]
    fn zero_tolerance_fails_inexact_cells() {
        let reports: Vec<_> =
            MF_REFERENCE.iter().map(|r| report(r.p, r.theta * 1.0001, r.order, r.delta_u, r.m_bar)).collect();
        let cells = compare(&MF_REFERENCE, &reports, 0.0, 0.0, Some(16));
        assert!(cells.iter().filter(|c| c.column == "theta_star").all(|c| c.status == CellStatus::Fail));
    }

    #[test]
    fn waiver_only_for_named_cell() {
        let mut reports: Vec<_> = MF_REFERENCE.iter().map(|r| report(r.p, r.theta, r.order, r.delta_u, r.m_bar)).collect();
        for r in reports.iter_mut().filter(|r| r.p >= 16) {
            r.m_bar_1 = r.m_bar_1.map(|m| m * 1.1);
        }
        let cells = compare(&MF_REFERENCE, &reports, 1e-3, 0.02, Some(16));
        let m: Vec<_> = cells.iter().filter(|c| c.column == "m_bar").map(|c| (c.p, c.status)).collect();
        assert!(m.contains(&(16, CellStatus::Waived)));
        assert!(m.contains(&(20, CellStatus::Fail)));
    }
}
