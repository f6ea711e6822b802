use jetcomplex::cauchyfueter::{degree7_certificate, exactness_dims, tor0_symbol};
use jetcomplex::complexbuilder::{build_complex, hilbert_series_u64, syzygy_generators, ChainEnd, SymbolMatrix};
use jetcomplex::exactalg::{choose, RankPolicy};
use jetcomplex::involution::is_involutive;
use jetcomplex::jets::tableau_dim;
use jetcomplex::wfamily::{torsion_symbol, wdim_formula, wtorsion_conditions};
use jetcomplex::Error;

use crate::report::{DimRow, OperatorBlock, ReportDocument, RunMetadata, Section, SystemSummary};
use crate::system_file::LoadedSystem;
use crate::CliError;

/// Largest `k` the alternating-sum certificate needs.
pub const CF_KMAX: u32 = 7;

/// Refuse jet matrices with more rows than this.
pub const MAX_JET_ROWS: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub max_degree: u32,
    pub max_length: Option<usize>,
    pub modular_threshold: usize,
    pub prime_trials: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, samples: 20, max_degree: 4, max_length: None, modular_threshold: 2000, prime_trials: 2 }
    }
}

fn summary(s: &LoadedSystem) -> SystemSummary {
    SystemSummary {
        label: s.system.label.clone(),
        equations: s.system.equations(),
        unknowns: s.unknowns.clone(),
        variables: s.variables.clone(),
    }
}

fn dim_rows(s: &LoadedSystem, qmax: u32) -> Result<Vec<DimRow>, CliError> {
    (0..=qmax)
        .map(|q| {
            let formula = match s.wfamily() {
                Some(w) => Some(wdim_formula(w.index_set.n(), w.index_set.m(), w.index_set.t(), q)?),
                None => None,
            };
            Ok(DimRow { q, dim: tableau_dim(&s.system, q) as u64, formula })
        })
        .collect()
}

fn check_formula_rows(doc: &mut ReportDocument, rows: &[DimRow]) {
    if rows.iter().any(|r| r.formula.is_some()) {
        let bad: Vec<u32> = rows.iter().filter(|r| r.formula != Some(r.dim)).map(|r| r.q).collect();
        doc.check(
            "closed-form tableau dimension",
            bad.is_empty(),
            if bad.is_empty() { format!("matches the kernel for q = 0..={}", rows.len() - 1) } else { format!("differs at q = {bad:?}") },
        );
    }
}

fn involution_section(s: &LoadedSystem, opts: &Options) -> Result<Section, CliError> {
    let r = is_involutive(&s.system, opts.samples, opts.seed)?;
    Ok(Section::Involution {
        lhs: r.lhs,
        rhs_min: r.rhs_min,
        rhs_terms: r.rhs_terms,
        verdict: r.verdict,
        seed: r.seed,
        samples: r.rhs_samples,
    })
}

/// Tableau dimensions up to `max_degree` and the Cartan test.
pub fn cmd_analyze(s: &LoadedSystem, opts: &Options) -> Result<ReportDocument, CliError> {
    let meta = RunMetadata { seed: Some(opts.seed), samples: Some(opts.samples), max_degree: Some(opts.max_degree), ..Default::default() };
    let mut doc = ReportDocument::new("analyze", Some(summary(s)), meta);
    let rows = dim_rows(s, opts.max_degree)?;
    check_formula_rows(&mut doc, &rows);
    doc.sections.push(Section::Dimensions { rows });
    doc.sections.push(involution_section(s, opts)?);
    Ok(doc.finish())
}

fn slot_names(s: &LoadedSystem, slot: usize, size: usize) -> Vec<String> {
    if slot == 0 {
        s.unknowns.clone()
    } else {
        (1..=size).map(|i| format!("E{slot}_{i}")).collect()
    }
}

/// Iterated compatibility operators, each printed as differential conditions.
pub fn cmd_complex(s: &LoadedSystem, opts: &Options) -> Result<ReportDocument, CliError> {
    let n = s.system.variables();
    let max_len = opts.max_length.unwrap_or(n + 1);
    if max_len == 0 || max_len > n + 1 {
        return Err(CliError::Input(format!("--max-length must lie in 1..={}", n + 1)));
    }
    let meta = RunMetadata { max_degree: Some(opts.max_degree), max_length: Some(max_len), ..Default::default() };
    let mut doc = ReportDocument::new("complex", Some(summary(s)), meta);
    let chain = build_complex(&s.system, opts.max_degree, max_len)?;
    let operators = chain
        .operators
        .iter()
        .enumerate()
        .map(|(k, op)| OperatorBlock {
            index: k,
            order: chain.orders[k],
            rows: (0..op.nrows()).map(|m| op.display_row(m, &s.variables, &slot_names(s, k, chain.sizes[k]))).collect(),
        })
        .collect();
    doc.check(
        "consecutive operators compose to zero",
        chain.verify_products().is_ok(),
        format!("{} operators", chain.len()),
    );
    if s.is_cauchy_fueter() && chain.len() >= 2 {
        let same = chain.operators[1].row_space_equal(&tor0_symbol())?;
        doc.check("second operator spans the closed-form tor0", same, format!("row spaces equal: {same}"));
    }
    doc.cutoff = chain.possibly_incomplete() || chain.end == ChainEnd::MaxLength;
    doc.sections.push(Section::Complex {
        sizes: chain.sizes.clone(),
        orders: chain.orders.clone(),
        end: chain.end,
        cutoff: doc.cutoff,
        operators,
        syzygies: chain.stages.iter().map(|st| st.counts()).collect(),
    });
    Ok(doc.finish())
}

/// Fits the Hilbert-Poincare series to the first `terms` tableau dimensions.
///
/// The recurrence order is bounded by `min(n, (terms - 2) / 2)`, so that
/// every candidate fit is overdetermined.
pub fn cmd_hp(s: &LoadedSystem, terms: Option<usize>) -> Result<ReportDocument, CliError> {
    let n = s.system.variables();
    let terms = terms.unwrap_or(2 * (n + 2));
    if terms < 2 {
        return Err(CliError::Input("--terms must be at least 2".into()));
    }
    let max_order = n.min((terms - 2) / 2);
    let meta = RunMetadata { max_degree: Some(terms as u32 - 1), ..Default::default() };
    let mut doc = ReportDocument::new("hp", Some(summary(s)), meta);
    let dims: Vec<u64> = (0..terms as u32).map(|q| tableau_dim(&s.system, q) as u64).collect();
    let section = match hilbert_series_u64(&dims, max_order) {
        Ok(series) => {
            let d = series.display();
            doc.check("rational fit", true, format!("reproduces all {terms} terms"));
            Section::Hilbert {
                dims,
                max_order,
                numerator: Some(d.numerator),
                denominator: Some(d.denominator),
                verified_terms: series.verified_terms,
            }
        }
        Err(e @ Error::NoRationalFit { .. }) => {
            doc.check("rational fit", false, e.to_string());
            Section::Hilbert { dims, max_order, numerator: None, denominator: None, verified_terms: 0 }
        }
        Err(e) => return Err(e.into()),
    };
    doc.sections.push(section);
    Ok(doc.finish())
}

/// Exactness of the Cauchy-Fueter complex at jet level for `k = 0..=kmax`, and the degree certificate.
pub fn cmd_verify_cf(kmax: u32, opts: &Options) -> Result<ReportDocument, CliError> {
    if kmax > CF_KMAX {
        return Err(CliError::Input(format!(
            "--kmax {kmax} exceeds {CF_KMAX}: the alternating sum has degree at most 7 in k, so k = 0..7 already decides it"
        )));
    }
    let meta = RunMetadata {
        seed: Some(opts.seed),
        modular_threshold: Some(opts.modular_threshold),
        prime_trials: Some(opts.prime_trials),
        ..Default::default()
    };
    let mut doc = ReportDocument::new("verify-cf", None, meta);
    let policy = RankPolicy::Auto { threshold: opts.modular_threshold, trials: opts.prime_trials, seed: opts.seed };
    let mut rows = Vec::new();
    for k in 0..=kmax {
        let r = exactness_dims(k, &policy, MAX_JET_ROWS)?;
        doc.check(
            &format!("exact at k={k}"),
            r.passed(),
            format!("kernel {} vs formula {}, exact={}, onto={}", r.kernel_cf, r.kernel_formula, r.exact, r.surjective),
        );
        rows.push(r);
    }
    doc.sections.push(Section::Exactness { rows });
    let cert = degree7_certificate();
    doc.check("alternating sum vanishes identically", cert.passed, format!("values {:?}", cert.values));
    doc.sections.push(Section::Certificate(cert));
    Ok(doc.finish())
}

/// The W-family for an index set: closed-form dimensions against kernels,
/// torsion conditions, and the Cartan test.
pub fn cmd_wfamily(s: &LoadedSystem, opts: &Options) -> Result<ReportDocument, CliError> {
    let w = s.wfamily().ok_or_else(|| CliError::Input("not a W-family system".into()))?;
    let meta = RunMetadata { seed: Some(opts.seed), samples: Some(opts.samples), max_degree: Some(opts.max_degree), ..Default::default() };
    let mut doc = ReportDocument::new("wfamily", Some(summary(s)), meta);
    let rows = dim_rows(s, opts.max_degree)?;
    check_formula_rows(&mut doc, &rows);
    doc.sections.push(Section::Dimensions { rows });
    let conds = wtorsion_conditions(w);
    let t = w.index_set.t();
    let stage = syzygy_generators(&SymbolMatrix::from_system(&w.base), 2)?;
    let expected = choose(t as i64, 3);
    doc.check(
        "degree-2 syzygies counted by triples",
        stage.count_at(2) as u64 == expected && conds.len() as u64 == expected,
        format!("{} generators, C({t},3) = {expected}", stage.count_at(2)),
    );
    if !conds.is_empty() {
        let tor = torsion_symbol(w)?;
        let vanishes = tor.compose(&SymbolMatrix::from_system(&w.base))?.is_zero();
        doc.check("torsion conditions annihilate the operator", vanishes, format!("{} conditions", conds.len()));
    }
    doc.sections.push(Section::Torsion { conditions: conds.iter().map(|c| c.display(&w.index_set)).collect() });
    doc.sections.push(involution_section(s, opts)?);
    Ok(doc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use crate::system_file::parse_system;
    use jetcomplex::involution::Verdict;

    fn opts() -> Options {
        Options { samples: 5, ..Default::default() }
    }

    #[test]
    fn analyze_cf() {
        let doc = cmd_analyze(&parse_system("cauchy-fueter").unwrap(), &Options { max_degree: 3, ..opts() }).unwrap();
        let Section::Dimensions { rows } = &doc.sections[0] else { panic!() };
        assert_eq!(rows.iter().map(|r| r.dim).collect::<Vec<_>>(), vec![12, 40, 100, 210]);
        let Section::Involution { lhs, rhs_min, verdict, .. } = &doc.sections[1] else { panic!() };
        assert_eq!((*lhs, *rhs_min, *verdict), (40, 42, Verdict::NotInvolutive));
        assert!(doc.to_string().contains("not involutive (40 < 42)"));
        assert_eq!(doc.status, Status::Pass);
    }

    #[test]
    fn analyze_small_wfamily_is_involutive() {
        let doc = cmd_analyze(&parse_system("wfamily:2,2,[(1,1)]").unwrap(), &opts()).unwrap();
        let Section::Involution { verdict, .. } = &doc.sections[1] else { panic!() };
        assert_eq!(*verdict, Verdict::Involutive);
    }

    #[test]
    fn complex_cf_and_cutoff() {
        let cf = parse_system("cauchy-fueter").unwrap();
        let doc = cmd_complex(&cf, &Options { max_degree: 3, ..opts() }).unwrap();
        let Section::Complex { sizes, orders, .. } = &doc.sections[0] else { panic!() };
        assert_eq!((sizes.clone(), orders.clone()), (vec![2, 4, 4, 2], vec![1, 2, 1]));
        assert_eq!(doc.status, Status::Pass);
        let cut = cmd_complex(&cf, &Options { max_degree: 1, ..opts() }).unwrap();
        assert_eq!(cut.status, Status::Cutoff);
        assert_eq!((cut.exit_code(false), cut.exit_code(true)), (0, 3));
        assert!(cut.to_string().contains("cutoff reached"));
    }

    #[test]
    fn hp_examples() {
        let doc = cmd_hp(&parse_system("cauchy-fueter").unwrap(), Some(14)).unwrap();
        let Section::Hilbert { numerator, denominator, .. } = &doc.sections[0] else { panic!() };
        assert_eq!(numerator.as_deref(), Some("12 - 20z + 20z^2 - 10z^3 + 2z^4"));
        assert_eq!(denominator.as_deref(), Some("(1-z)^5"));
        let w = cmd_hp(&parse_system("wfamily:3,3,[(3,3),(2,2)]").unwrap(), None).unwrap();
        assert_eq!(w.status, Status::Pass);
    }

    #[test]
    fn verify_cf_bounds() {
        let doc = cmd_verify_cf(1, &opts()).unwrap();
        assert_eq!(doc.status, Status::Pass);
        let Section::Exactness { rows } = &doc.sections[0] else { panic!() };
        assert_eq!(rows[0].ranks, vec![450, 30, 2]);
        assert_eq!(rows[1].ranks[2], 16);
        assert!(matches!(cmd_verify_cf(9, &opts()), Err(CliError::Input(_))));
    }

    #[test]
    fn wfamily_report() {
        let doc = cmd_wfamily(&parse_system("wfamily:4,4,[(1,1),(2,2),(3,3)]").unwrap(), &Options { max_degree: 2, ..opts() }).unwrap();
        assert_eq!(doc.status, Status::Pass);
        let Section::Torsion { conditions } = &doc.sections[1] else { panic!() };
        assert_eq!(conditions.len(), 1);
    }
}
