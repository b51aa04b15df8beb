use rayon::prelude::*;
use serde_json::{json, Value};
use wakimoto::brst::{
    bgg_character, euler_character, module_character, q1_checks, screening_q1, ComplexDescriptor, ModuleKind,
};
use wakimoto::currents::{highest_weight_suite, relation_suite, Realization, RelationReport};
use wakimoto::exact::series_compare;
use wakimoto::fock::{FockVector, SectorLabel, WeightLabel};
use wakimoto::structure::{
    annihilator_kernel, cosingular_report, det_c, scan_sector, verify_structure, StructureReport, StructureStatus,
};
use wakimoto::{format_rat, int, rat, Error, Rat};

use crate::config::RunConfig;
use crate::record::{rat_value, series_value, vector_value, ResultRecord, Status};
use crate::CliError;

/// Brackets are checked for `|m|, |n|` up to this bound.
pub const RELATION_MODE_BOUND: i64 = 3;

/// Relation failures listed per sector; the count is always complete.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Relations,
    Detc,
    Singular,
    Cosingular,
    Structure,
    Characters,
    Euler,
    Screening,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Relations => "relations",
            Command::Detc => "detc",
            Command::Singular => "singular",
            Command::Cosingular => "cosingular",
            Command::Structure => "structure",
            Command::Characters => "characters",
            Command::Euler => "euler",
            Command::Screening => "screening",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub record: ResultRecord,
    pub exit_code: i32,
}

fn engine_error(e: Error) -> CliError {
    match e {
        Error::InvalidParams(_) | Error::NotDegenerate(_) | Error::SectorMismatch(_) => CliError::Usage(e.to_string()),
        Error::ScreeningUndefined(_)
        | Error::UnreachableExponent(_)
        | Error::NoBetaZeroMode
        | Error::IllegalMode { .. }
        | Error::IncommensurateGradings(..)
        | Error::NotDiagonalizable => CliError::Undefined(e.to_string()),
        _ => CliError::Failed(e.to_string()),
    }
}

/// Runs `command`; usage errors come back as `Err`, every other outcome as
/// a record with its exit code.
pub fn run(command: Command, config: &RunConfig) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", config.jobs)))?;
    let result = pool.install(|| dispatch(command, config));
    let (status, payload, exit_code) = match result {
        Ok((status, payload)) => {
            let code = if status == Status::Pass { 0 } else { 1 };
            (status, payload, code)
        }
        Err(CliError::Usage(msg)) => return Err(CliError::Usage(msg)),
        Err(CliError::Undefined(msg)) => (Status::Error, json!({ "error": msg }), 3),
        Err(CliError::Failed(msg)) => (Status::Fail, json!({ "error": msg }), 1),
    };
    Ok(Outcome {
        record: ResultRecord {
            command: command.name().to_string(),
            params: config.canonical(),
            status,
            payload,
            engine_version: wakimoto::VERSION.to_string(),
        },
        exit_code,
    })
}

fn dispatch(command: Command, config: &RunConfig) -> Result<(Status, Value), CliError> {
    match command {
        Command::Relations => relations(config),
        Command::Detc => detc(config),
        Command::Singular => singular(config),
        Command::Cosingular => cosingular(config),
        Command::Structure => structure(config),
        Command::Characters => characters(config),
        Command::Euler => euler(config),
        Command::Screening => screening(config),
    }
}

/// `--j` when given, otherwise `j_{m+lp, m'+1/2}` from the validated labels.
fn target_sector(config: &RunConfig) -> Result<SectorLabel, CliError> {
    if config.m.is_some() {
        let (m, m_prime) = config.degenerate_labels()?;
        if config.j.is_some() {
            return Err(CliError::Usage("give either --j or --m, not both".into()));
        }
        if config.l < 0 {
            return Err(CliError::Usage(format!("l = {} must be nonnegative", config.l)));
        }
        let (p, _) = config.params.p_pair().expect("checked by degenerate_labels");
        let label = m + config.l * p as i64;
        return Ok(SectorLabel::labeled(config.params.clone(), &int(label), &rat(2 * m_prime + 1, 2)));
    }
    let j = config.j.clone().ok_or_else(|| CliError::Usage("a sector is required: --j or --m".into()))?;
    Ok(SectorLabel::new(config.params.clone(), j))
}

fn report_value(j: &Rat, r: &RelationReport) -> Value {
    json!({
        "j": format_rat(j),
        "checks": r.checks,
        "failure_count": r.failures.len(),
        "failures": r.failures.iter().take(MAX_LISTED_FAILURES).map(|f| f.relation.clone() + " on " + &f.vector).collect::<Vec<_>>(),
    })
}

fn relations(config: &RunConfig) -> Result<(Status, Value), CliError> {
    let js: Vec<Rat> = match &config.j {
        Some(j) => vec![j.clone()],
        None => vec![int(0), rat(1, 2), int(2)],
    };
    let r = Realization::new(config.params.clone());
    let degree = config.degree;
    let reports: Vec<(Rat, RelationReport, RelationReport, RelationReport)> = js
        .par_iter()
        .map(|j| {
            let plain = relation_suite(&r, j, degree, RELATION_MODE_BOUND, false);
            let twisted = relation_suite(&r, j, degree, RELATION_MODE_BOUND, true);
            let hw = highest_weight_suite(&r, j, degree.max(1) as i64);
            (j.clone(), plain, twisted, hw)
        })
        .collect();
    let ok = reports.iter().all(|(_, a, b, c)| a.passed() && b.passed() && c.passed());
    let payload = json!({
        "max_degree": degree,
        "mode_bound": RELATION_MODE_BOUND,
        "sectors": reports.iter().map(|(j, a, b, c)| json!({
            "j": format_rat(j),
            "relations": report_value(j, a),
            "twisted_relations": report_value(j, b),
            "highest_weight": report_value(j, c),
        })).collect::<Vec<_>>(),
    });
    Ok((Status::from_bool(ok), payload))
}

fn detc(config: &RunConfig) -> Result<(Status, Value), CliError> {
    if config.degree == 0 {
        return Err(CliError::Usage("detc needs --degree >= 1".into()));
    }
    let r = Realization::new(config.params.clone());
    let rep = det_c(&r, config.degree, &int(0)).map_err(engine_error)?;
    let payload = json!({
        "N": rep.n,
        "monic_roots": rep.roots.iter().map(|(x, m)| json!({ "root": format_rat(x), "multiplicity": m })).collect::<Vec<_>>(),
        "total_degree": rep.total_degree,
        "lemma_match": rep.lemma_match,
    });
    Ok((Status::from_bool(rep.lemma_match), payload))
}

fn singular(config: &RunConfig) -> Result<(Status, Value), CliError> {
    let sector = target_sector(config)?;
    let r = Realization::new(config.params.clone());
    let mut degrees = Vec::new();
    for n in 0..=config.degree {
        let ker = annihilator_kernel(&r, &sector, n, false).map_err(engine_error)?;
        degrees.push(json!({
            "N": n,
            "dimension": ker.len(),
            "vectors": ker.iter().map(|kv| json!({
                "x0_eigenvalue": format_rat(&kv.x0_eigenvalue),
                "vector": vector_value(&kv.vector),
            })).collect::<Vec<_>>(),
        }));
    }
    Ok((Status::Pass, json!({ "j": format_rat(&sector.j), "degrees": degrees })))
}

fn cosingular(config: &RunConfig) -> Result<(Status, Value), CliError> {
    let sector = target_sector(config)?;
    let r = Realization::new(config.params.clone());
    let rep = cosingular_report(&r, &sector, config.degree).map_err(engine_error)?;
    let payload = json!({
        "j": format_rat(&sector.j),
        "found": rep.found.iter().map(|c| json!({ "N": c.degree, "weight_j": format_rat(&c.weight_j) })).collect::<Vec<_>>(),
        "det_zero_degree": rep.det_zero_degree,
        "det_root_multiplicity": rep.det_root_multiplicity,
        "consistent": rep.consistent,
    });
    Ok((Status::from_bool(rep.consistent), payload))
}

fn structure_value(rep: &StructureReport) -> Value {
    let pattern = match rep.status {
        StructureStatus::Generic => "generic/irreducible",
        _ => "degenerate",
    };
    json!({
        "j": format_rat(&rep.sector.j),
        "max_N": rep.max_n,
        "result": rep.status.to_string(),
        "pattern": pattern,
        "fock_dimensions": rep.fock_dims,
        "singular_dimensions": rep.singular_dims,
        "found": rep.found.iter().map(|f| json!({
            "kind": f.kind.to_string(), "N": f.degree, "weight_j": format_rat(&f.weight_j),
        })).collect::<Vec<_>>(),
        "predicted": rep.predicted.iter().map(|v| json!({
            "vertex": format!("{}{}", v.kind, v.index),
            "N": v.degree,
            "weight_j": format_rat(&v.weight.j),
            "found": v.found,
        })).collect::<Vec<_>>(),
        "unexpected": rep.unexpected.iter().map(|f| json!({
            "kind": f.kind.to_string(), "N": f.degree, "weight_j": format_rat(&f.weight_j),
        })).collect::<Vec<_>>(),
        "vacuum_submodule_dimensions": rep.vacuum_closure_dims,
        "singular_submodule_dimensions": rep.singular_closure_dims,
        "irreducible_quotient_dimensions": rep.irreducible_quotient_dims(),
        "arrow_v0_u1": rep.arrow_v0_u1,
        "w0_outside_vacuum_submodule": rep.w0_outside_vacuum_module,
    })
}

fn structure(config: &RunConfig) -> Result<(Status, Value), CliError> {
    let rep = if config.m.is_some() {
        let (m, m_prime) = config.degenerate_labels()?;
        verify_structure(&config.params, m, m_prime, config.l, config.degree).map_err(engine_error)?
    } else {
        let sector = target_sector(config)?;
        scan_sector(&config.params, &sector.j, config.degree).map_err(engine_error)?
    };
    let status = match rep.status {
        StructureStatus::Pass | StructureStatus::Generic => Status::Pass,
        StructureStatus::Fail => Status::Fail,
        StructureStatus::Inconclusive => Status::Inconclusive,
    };
    Ok((status, structure_value(&rep)))
}

fn weight_value(w: &WeightLabel) -> Value {
    let (l0, l1, delta) = w.fundamental_coordinates();
    json!({
        "k": rat_value(&w.k),
        "j": rat_value(&w.j),
        "h": rat_value(&w.h),
        "fundamental": [rat_value(&l0), rat_value(&l1), rat_value(&delta)],
    })
}

fn characters(config: &RunConfig) -> Result<(Status, Value), CliError> {
    let sector = target_sector(config)?;
    let w = sector.weight();
    let irreducible = match config.m {
        Some(_) if config.l == 0 => {
            let (m, m_prime) = config.degenerate_labels()?;
            Some(bgg_character(&config.params, m, m_prime, config.order).map_err(engine_error)?)
        }
        _ => None,
    };
    let payload = json!({
        "weight": weight_value(&w),
        "fock": series_value(&module_character(ModuleKind::Fock, &w, config.order)),
        "verma": series_value(&module_character(ModuleKind::Verma, &w, config.order)),
        "irreducible": irreducible.as_ref().map(series_value),
    });
    Ok((Status::Pass, payload))
}

fn euler(config: &RunConfig) -> Result<(Status, Value), CliError> {
    let (m, m_prime) = config.degenerate_labels()?;
    let descriptor = ComplexDescriptor::new(config.params.clone(), m, m_prime).map_err(engine_error)?;
    let euler = euler_character(&descriptor, config.order).map_err(engine_error)?;
    let bgg = bgg_character(&config.params, m, m_prime, config.order).map_err(engine_error)?;
    let cmp = series_compare(&euler, &bgg).map_err(engine_error)?;
    let payload = json!({
        "complex": descriptor.to_string(),
        "positions": descriptor.positions(config.order).iter().map(|t| json!({
            "position": t.index,
            "label": descriptor.label(t.index),
            "sign": t.sign,
            "offset": format_rat(&t.weight.h),
        })).collect::<Vec<_>>(),
        "euler": series_value(&euler),
        "bgg": series_value(&bgg),
        "equal": cmp.equal,
        "compared": cmp.compared,
        "first_discrepancy": cmp.first_discrepancy.map(|d| json!({
            "degree": d.degree, "exponent": format_rat(&d.exponent),
            "euler": format_rat(&d.left), "bgg": format_rat(&d.right),
        })),
    });
    Ok((Status::from_bool(cmp.equal), payload))
}

fn screening(config: &RunConfig) -> Result<(Status, Value), CliError> {
    if config.m.is_some() {
        config.degenerate_labels()?;
    }
    let source = match (config.source_m, &config.j) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --j or --source-m, not both".into())),
        (Some(sm), None) => {
            SectorLabel::labeled(config.params.clone(), &int(sm), &rat(2 * config.source_m_prime + 1, 2))
        }
        (None, Some(j)) => SectorLabel::new(config.params.clone(), j.clone()),
        (None, None) => return Err(CliError::Usage("a source sector is required: --source-m or --j".into())),
    };
    let r = Realization::new(config.params.clone());
    let rep = q1_checks(&r, &source, config.degree).map_err(engine_error)?;
    let image = screening_q1(&r, &FockVector::vacuum(source.clone())).map_err(engine_error)?;
    let payload = json!({
        "source_j": format_rat(&rep.source.j),
        "target_j": format_rat(&rep.target.j),
        "degree_shift": rep.degree_shift,
        "checks": rep.checks,
        "failure_count": rep.failures.len(),
        "failures": rep.failures.iter().take(MAX_LISTED_FAILURES).map(|f| format!("{} on {}", f.generator, f.vector)).collect::<Vec<_>>(),
        "grading_failures": rep.grading_failures,
        "vacuum_image": vector_value(&image),
        "proportionality": rep.proportionality.as_ref().map(rat_value),
    });
    Ok((Status::from_bool(rep.passed()), payload))
}
