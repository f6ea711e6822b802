//! Structured run reports, printed as text or JSON.

use std::fmt;

use jetcomplex::cauchyfueter::{CfExactness, DegreeCertificate};
use jetcomplex::complexbuilder::{ChainEnd, SyzygyCount};
use jetcomplex::involution::{CartanSample, Verdict};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Cutoff,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunMetadata {
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modular_threshold: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_trials: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemSummary {
    pub label: String,
    pub equations: usize,
    pub unknowns: Vec<String>,
    pub variables: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimRow {
    pub q: u32,
    pub dim: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorBlock {
    pub index: usize,
    pub order: u32,
    pub rows: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Section {
    Dimensions {
        rows: Vec<DimRow>,
    },
    Involution {
        lhs: usize,
        rhs_min: usize,
        rhs_terms: Vec<usize>,
        verdict: Verdict,
        seed: u64,
        samples: Vec<CartanSample>,
    },
    Complex {
        sizes: Vec<usize>,
        orders: Vec<u32>,
        end: ChainEnd,
        cutoff: bool,
        operators: Vec<OperatorBlock>,
        syzygies: Vec<Vec<SyzygyCount>>,
    },
    Hilbert {
        dims: Vec<u64>,
        max_order: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        numerator: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        denominator: Option<String>,
        verified_terms: usize,
    },
    Exactness {
        rows: Vec<CfExactness>,
    },
    Certificate(DegreeCertificate),
    Torsion {
        conditions: Vec<String>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSummary>,
    pub metadata: RunMetadata,
    pub sections: Vec<Section>,
    pub checks: Vec<Check>,
    pub cutoff: bool,
    pub status: Status,
}

impl ReportDocument {
    pub fn new(command: &str, system: Option<SystemSummary>, metadata: RunMetadata) -> Self {
        ReportDocument {
            command: command.into(),
            system,
            metadata: RunMetadata { version: env!("CARGO_PKG_VERSION"), ..metadata },
            sections: Vec::new(),
            checks: Vec::new(),
            cutoff: false,
            status: Status::Pass,
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    /// Sets `status` from the checks and the cutoff flag.
    pub fn finish(mut self) -> Self {
        self.status = if self.checks.iter().any(|c| !c.passed) {
            Status::Fail
        } else if self.cutoff {
            Status::Cutoff
        } else {
            Status::Pass
        };
        self
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Cutoff if strict => 3,
            Status::Cutoff => 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn rank_method(r: &jetcomplex::exactalg::RankOutcome) -> String {
    match &r.modular {
        None => "rational".into(),
        Some(m) => format!("mod-p, {} primes", m.primes.len()),
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Dimensions { rows } => {
                writeln!(f, "tableau dimensions")?;
                for r in rows {
                    match r.formula {
                        Some(v) => writeln!(f, "  q={:<3} dim={:<8} closed form={v}", r.q, r.dim)?,
                        None => writeln!(f, "  q={:<3} dim={}", r.q, r.dim)?,
                    }
                }
            }
            Section::Involution { lhs, rhs_min, rhs_terms, verdict, seed, samples } => {
                writeln!(f, "Cartan test ({} coordinate samples, seed {seed})", samples.len())?;
                writeln!(f, "  dim A^1 = {lhs}, smallest sum_j j*dim A_j = {rhs_min} with terms {rhs_terms:?}")?;
                let text = match verdict {
                    Verdict::Involutive => format!("involutive ({lhs} = {rhs_min})"),
                    Verdict::NotInvolutive => format!("not involutive ({lhs} < {rhs_min})"),
                };
                writeln!(f, "  verdict: {text}")?;
            }
            Section::Complex { sizes, orders, end, cutoff, operators, syzygies } => {
                let chain: Vec<String> = sizes.iter().map(usize::to_string).collect();
                writeln!(f, "compatibility complex {} with orders {orders:?} ({end:?})", chain.join(" -> "))?;
                if *cutoff {
                    writeln!(f, "  cutoff reached: generators beyond the degree or length bound may be missing")?;
                }
                for op in operators {
                    writeln!(f, "  operator {} (order {})", op.index, op.order)?;
                    for (k, row) in op.rows.iter().enumerate() {
                        writeln!(f, "    [{}] {row} = 0", k + 1)?;
                    }
                }
                for (s, counts) in syzygies.iter().enumerate() {
                    let c: Vec<String> =
                        counts.iter().filter(|c| c.new_generators > 0).map(|c| format!("{}@deg{}", c.new_generators, c.degree)).collect();
                    writeln!(f, "  syzygies of operator {s}: {}", if c.is_empty() { "none".into() } else { c.join(", ") })?;
                }
            }
            Section::Hilbert { dims, max_order, numerator, denominator, verified_terms } => {
                writeln!(f, "Hilbert-Poincare series")?;
                writeln!(f, "  dims: {dims:?}")?;
                match (numerator, denominator) {
                    (Some(n), Some(d)) => {
                        writeln!(f, "  series: ({n}) / {d}")?;
                        writeln!(f, "  verified against {verified_terms} terms")?;
                    }
                    _ => writeln!(f, "  no rational fit with recurrence order <= {max_order}")?,
                }
            }
            Section::Exactness { rows } => {
                writeln!(f, "jet-level exactness of S2_(k+4) -> S4_(k+3) -> S4_(k+1) -> S2_k")?;
                for r in rows {
                    let methods: Vec<String> = r.report.ranks.iter().map(rank_method).collect();
                    writeln!(
                        f,
                        "  k={}: dims {:?} ranks {:?} [{}] kernel {} (formula {}) exact={} onto={}",
                        r.k,
                        r.dims,
                        r.ranks,
                        methods.join("; "),
                        r.kernel_cf,
                        r.kernel_formula,
                        r.exact,
                        r.surjective
                    )?;
                }
            }
            Section::Certificate(c) => {
                writeln!(f, "alternating-sum certificate (polynomial of degree <= {} in k)", c.degree_bound)?;
                writeln!(f, "  values at k=0..7: {:?}", c.values)?;
                writeln!(f, "  8th difference: {}", c.eighth_difference)?;
            }
            Section::Torsion { conditions } => {
                writeln!(f, "torsion conditions ({})", conditions.len())?;
                for c in conditions {
                    writeln!(f, "  {c}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "jetcomplex {}", self.command)?;
        if let Some(s) = &self.system {
            write!(
                f,
                ": {} ({} equations, unknowns {}, variables {})",
                s.label,
                s.equations,
                s.unknowns.join(","),
                s.variables.join(",")
            )?;
        }
        writeln!(f)?;
        for s in &self.sections {
            writeln!(f)?;
            write!(f, "{s}")?;
        }
        if !self.checks.is_empty() {
            writeln!(f)?;
            writeln!(f, "checks")?;
            for c in &self.checks {
                writeln!(f, "  [{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail)?;
            }
        }
        writeln!(f)?;
        write!(f, "status: {:?}", self.status)
    }
}
