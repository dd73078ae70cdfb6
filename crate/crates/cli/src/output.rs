use std::path::Path;

use gvs_core::suites::CaseResult;
use gvs_core::Error;
use serde::Serialize;

/// One CSV line: suite_id, case_id, alpha, k, p_desc, q_desc, lhs, rhs, ratio, pass.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    suite_id: String,
    case_id: String,
    alpha: Option<f64>,
    k: Option<u32>,
    p_desc: String,
    q_desc: String,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    pass: bool,
}

impl CsvRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        suite_id: &str,
        case_id: &str,
        alpha: Option<f64>,
        k: Option<u32>,
        p_desc: &str,
        q_desc: &str,
        lhs: f64,
        rhs: f64,
        pass: bool,
    ) -> Self {
        let case = CaseResult::new(case_id, lhs, rhs, pass);
        Self {
            suite_id: suite_id.to_string(),
            case_id: case.case_id,
            alpha,
            k,
            p_desc: p_desc.to_string(),
            q_desc: q_desc.to_string(),
            lhs,
            rhs,
            ratio: case.ratio,
            pass: case.pass,
        }
    }

    pub fn from_case(suite_id: &str, c: &CaseResult) -> Self {
        Self {
            suite_id: suite_id.to_string(),
            case_id: c.case_id.clone(),
            alpha: c.alpha,
            k: c.k,
            p_desc: c.p_desc.clone(),
            q_desc: c.q_desc.clone(),
            lhs: c.lhs,
            rhs: c.rhs,
            ratio: c.ratio,
            pass: c.pass,
        }
    }
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<(), Error> {
    let io = |e: csv::Error| Error::invalid(format!("writing {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::invalid(format!("writing {}: {e}", path.display())))
}
