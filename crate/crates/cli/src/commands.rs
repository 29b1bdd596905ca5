use std::io::Write;

use chrono::{SecondsFormat, Utc};
use num::{BigInt, Signed};
use serde_json::{json, Value};

use ntkit::descent::{self, DescentError, SplitCurve};
use ntkit::diophantine::{member_search, DiophantineSet};
use ntkit::elliptic::{self, CurveQ, EllipticError, PointQ};
use ntkit::family::{self, FamilyError, FamilyParams, PipelineConfig};
use ntkit::json as j;
use ntkit::ntheory::{parse_bigint, parse_bigrat, BigRat, Budget};
use ntkit::pell;

use crate::manifest::{Emitter, Format, RunManifest};
use crate::{Cli, Command, CurveArgs, DescentArgs, DiophArgs, FamilyArgs, Failure, Outcome, PellArgs};

type Run = Result<Outcome, Failure>;

pub fn run<W: Write>(cli: &Cli, out: W) -> Run {
    let timestamp = cli.timestamp.clone().unwrap_or_else(|| Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true));
    let budget = Budget(cli.factor_budget);
    let name = match &cli.command {
        Command::Pell(_) => "pell",
        Command::Dioph(_) => "dioph",
        Command::Curve(_) => "curve",
        Command::Descent(_) => "descent",
        Command::Family(_) => "family",
    };
    let mut manifest = RunManifest::new(name, timestamp);
    manifest.param("format", if cli.format == Format::Json { "json" } else { "csv" });
    manifest.param("factor_budget", budget.0);
    match &cli.command {
        Command::Pell(a) => pell_cmd(a, cli.format, &mut manifest, out),
        Command::Dioph(a) => dioph_cmd(a, cli.format, &mut manifest, out),
        Command::Curve(a) => curve_cmd(a, cli.format, &mut manifest, out),
        Command::Descent(a) => descent_cmd(a, cli.format, budget, &mut manifest, out),
        Command::Family(a) => family_cmd(a, cli.format, budget, &mut manifest, out),
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn int(s: &str, what: &str) -> Result<BigInt, Failure> {
    parse_bigint(s).map_err(|_| usage(format!("{what}: expected an integer, got {s:?}")))
}

fn ratio(s: &str, what: &str) -> Result<BigRat, Failure> {
    parse_bigrat(s).map_err(|_| usage(format!("{what}: expected an integer or p/q, got {s:?}")))
}

fn point(s: &str) -> Result<PointQ, Failure> {
    s.parse().map_err(usage)
}

fn json_only(format: Format, what: &str) -> Result<(), Failure> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(usage(format!("{what} has no tabular form; use --format json"))),
    }
}

fn pell_cmd<W: Write>(a: &PellArgs, format: Format, manifest: &mut RunManifest, out: W) -> Run {
    let param = int(&a.a, "--a")?;
    manifest.param("a", j::int(&param));
    if a.divisibility {
        let (m, n) = (a.m.unwrap_or(0), a.n.unwrap_or(0));
        json_only(format, "the divisibility report")?;
        let report = pell::divisibility_report(&param, m, n).map_err(usage)?;
        manifest.param("mode", "divisibility").param("m", m).param("n", n);
        let mut em = Emitter::new(out, format, manifest)?;
        em.record(&report.to_json())?;
        em.flush()?;
    } else if let Some(bound) = &a.bound {
        let bound = int(bound, "--bound")?;
        let found = pell::enumerate_solutions_below(&param, &bound).map_err(usage)?;
        manifest.param("mode", "enumerate").param("bound", j::int(&bound));
        let mut em = Emitter::new(out, format, manifest)?;
        if format == Format::Csv {
            em.csv_row(&["x", "y"])?;
        }
        for (x, y) in &found {
            match format {
                Format::Json => em.record(&json!({ "x": j::int(x), "y": j::int(y) }))?,
                Format::Csv => em.csv_row(&[x.to_string(), y.to_string()])?,
            }
        }
        em.flush()?;
    } else {
        let count = a.count.unwrap_or(0);
        let seq = pell::pell_sequence(&param, count).map_err(usage)?;
        manifest.param("mode", "sequence").param("count", count);
        let mut em = Emitter::new(out, format, manifest)?;
        if format == Format::Csv {
            em.csv_row(&["n", "x", "y"])?;
        }
        for s in &seq {
            match format {
                Format::Json => em.record(&json!({ "n": s.index, "x": j::int(&s.x), "y": j::int(&s.y) }))?,
                Format::Csv => em.csv_row(&[s.index.to_string(), s.x.to_string(), s.y.to_string()])?,
            }
        }
        em.flush()?;
    }
    Ok(Outcome::Success)
}

fn dioph_cmd<W: Write>(a: &DiophArgs, format: Format, manifest: &mut RunManifest, out: W) -> Run {
    json_only(format, "a membership result")?;
    let set = DiophantineSet::parse(&a.poly).map_err(usage)?;
    let params: Vec<BigInt> = a.params.iter().map(|p| int(p, "--params")).collect::<Result<_, _>>()?;
    let bound = int(&a.bound, "--bound")?;
    manifest
        .param("poly", set.render())
        .param("params", j::ints(&params))
        .param("bound", j::int(&bound));
    let mut result = member_search(&set, &params, &bound).map_err(usage)?;
    if !result.is_member() && set == DiophantineSet::four_squares() && params[0].is_negative() {
        result.note = Some("a sum of four squares is never negative, so no bound yields a witness".into());
    }
    let mut em = Emitter::new(out, format, manifest)?;
    em.record(&result.to_json())?;
    em.flush()?;
    Ok(if result.is_member() { Outcome::Success } else { Outcome::InconclusiveOnly })
}

fn elliptic_failure(e: EllipticError) -> Failure {
    usage(e)
}

fn curve_cmd<W: Write>(a: &CurveArgs, format: Format, manifest: &mut RunManifest, out: W) -> Run {
    let curve = CurveQ::new(ratio(&a.a, "--a")?, ratio(&a.b, "--b")?).map_err(elliptic_failure)?;
    manifest.param("a", j::rat(curve.a())).param("b", j::rat(curve.b()));
    let base = json!({ "schema": j::SCHEMA_VERSION, "curve": curve.to_json() });
    let with = |op: &str, extra: Value| {
        let mut v = base.clone();
        v["op"] = json!(op);
        for (k, val) in extra.as_object().into_iter().flatten() {
            v[k] = val.clone();
        }
        v
    };

    if let Some(h) = &a.search {
        let h = int(h, "--search")?;
        manifest.param("op", "search").param("height", j::int(&h));
        let pts = elliptic::naive_point_search(&curve, &h).map_err(elliptic_failure)?;
        let mut em = Emitter::new(out, format, manifest)?;
        match format {
            Format::Json => {
                let list: Vec<Value> = pts.iter().map(PointQ::to_json).collect();
                em.record(&with("search", json!({ "height": j::int(&h), "points": list })))?;
            }
            Format::Csv => {
                em.csv_row(&["x", "y"])?;
                for p in &pts {
                    if let PointQ::Affine { x, y } = p {
                        em.csv_row(&[x.to_string(), y.to_string()])?;
                    }
                }
            }
        }
        em.flush()?;
        return Ok(Outcome::Success);
    }

    json_only(format, "this curve operation")?;
    let record = if let Some(pq) = &a.add {
        let (p, q) = (point(&pq[0])?, point(&pq[1])?);
        manifest.param("op", "add").param("p", p.to_string()).param("q", q.to_string());
        let r = elliptic::add(&curve, &p, &q).map_err(elliptic_failure)?;
        with("add", json!({ "p": p.to_json(), "q": q.to_json(), "result": r.to_json() }))
    } else if let Some(kp) = &a.mul {
        let (k, p) = (int(&kp[0], "--mul")?, point(&kp[1])?);
        manifest.param("op", "mul").param("k", j::int(&k)).param("p", p.to_string());
        let r = elliptic::mul(&curve, &k, &p).map_err(elliptic_failure)?;
        with("mul", json!({ "k": j::int(&k), "p": p.to_json(), "result": r.to_json() }))
    } else if let Some(p) = &a.neg {
        let p = point(p)?;
        manifest.param("op", "neg").param("p", p.to_string());
        let r = elliptic::neg(&curve, &p).map_err(elliptic_failure)?;
        with("neg", json!({ "p": p.to_json(), "result": r.to_json() }))
    } else if let Some(p) = &a.on_curve {
        let p = point(p)?;
        manifest.param("op", "on-curve").param("p", p.to_string());
        with("on-curve", json!({ "p": p.to_json(), "result": elliptic::on_curve(&curve, &p) }))
    } else if let Some(p) = &a.torsion {
        let p = point(p)?;
        manifest.param("op", "torsion").param("p", p.to_string());
        let order = elliptic::is_torsion(&curve, &p).map_err(elliptic_failure)?;
        with("torsion", json!({ "p": p.to_json(), "order": order, "torsion": order.is_some() }))
    } else if a.scale {
        manifest.param("op", "scale");
        let s = elliptic::scale_model(&curve);
        with("scale", json!({ "u": j::rat(&s.u), "result": s.curve.to_json() }))
    } else {
        manifest.param("op", "info");
        with("info", json!({ "discriminant": j::rat(&curve.discriminant()), "integral": curve.is_integral() }))
    };
    let mut em = Emitter::new(out, format, manifest)?;
    em.record(&record)?;
    em.flush()?;
    Ok(Outcome::Success)
}

fn descent_failure(e: DescentError) -> Failure {
    match e {
        DescentError::RepeatedRoots(..) | DescentError::NotOnCurve(_) | DescentError::Elliptic(_) => usage(e),
        DescentError::IncompleteFactorization { .. } => Failure::Inconclusive(e.to_string()),
        DescentError::ClosureViolation { .. } | DescentError::LocalImageIncomplete { .. } => Failure::Internal(e.to_string()),
    }
}

fn descent_cmd<W: Write>(a: &DescentArgs, format: Format, budget: Budget, manifest: &mut RunManifest, out: W) -> Run {
    json_only(format, "a Selmer report")?;
    if a.roots.len() != 3 {
        return Err(usage(format!("--roots needs exactly three values, got {}", a.roots.len())));
    }
    let e: Vec<BigInt> = a.roots.iter().map(|r| int(r, "--roots")).collect::<Result<_, _>>()?;
    let curve = SplitCurve::new(e[0].clone(), e[1].clone(), e[2].clone()).map_err(descent_failure)?;
    manifest.param("roots", j::ints(&e));
    let points: Vec<PointQ> = a.point.iter().map(|p| point(p)).collect::<Result<_, _>>()?;

    if a.height.is_none() && points.is_empty() {
        let report = descent::two_selmer(&curve, budget).map_err(descent_failure)?;
        let mut em = Emitter::new(out, format, manifest)?;
        em.record(&report.to_json())?;
        em.flush()?;
        return Ok(Outcome::Success);
    }
    let height = match &a.height {
        Some(h) => int(h, "--height")?,
        None => BigInt::from(0),
    };
    manifest
        .param("height", j::int(&height))
        .param("points", points.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    let window = descent::rank_window(&curve, &height, &points, budget).map_err(descent_failure)?;
    let mut em = Emitter::new(out, format, manifest)?;
    em.record(&window.to_json())?;
    em.flush()?;
    Ok(if window.certified() { Outcome::Success } else { Outcome::InconclusiveOnly })
}

fn family_failure(e: FamilyError) -> Failure {
    match e {
        FamilyError::Inconsistent { .. } | FamilyError::Descent { .. } => Failure::Internal(e.to_string()),
        _ => usage(e),
    }
}

fn family_cmd<W: Write>(a: &FamilyArgs, format: Format, budget: Budget, manifest: &mut RunManifest, out: W) -> Run {
    if a.a.len() != 3 {
        return Err(usage(format!("--a needs exactly three values, got {}", a.a.len())));
    }
    let av: Vec<BigInt> = a.a.iter().map(|v| int(v, "--a")).collect::<Result<_, _>>()?;
    let params = FamilyParams::new(av[0].clone(), av[1].clone(), av[2].clone()).map_err(family_failure)?;
    if a.n_min < 1 {
        return Err(usage("--n-min must be at least 1"));
    }
    manifest
        .param("a", j::ints(&av))
        .param("m_min", a.m_min)
        .param("m_max", a.m_max)
        .param("n_min", a.n_min)
        .param("n_max", a.n_max)
        .param("prime_filter", !a.all_pairs)
        .param("certify", a.certify)
        .param("height", a.height);
    let (m_range, n_range) = (a.m_min..=a.m_max, a.n_min..=a.n_max);

    if !a.certify {
        let pairs = if a.all_pairs {
            family::all_members_in_box(&params, m_range, n_range)
        } else {
            family::four_primes_search(&params, m_range, n_range)
        };
        let mut em = Emitter::new(out, format, manifest)?;
        if format == Format::Csv {
            em.csv_row(&["m", "n", "F", "disc_core", "e1", "e2", "e3", "taut_point"])?;
        }
        for (m, n) in &pairs {
            let mem = family::make_member(&params, m, n).map_err(family_failure)?;
            match em.format() {
                Format::Json => em.record(&json!({
                    "schema": j::SCHEMA_VERSION,
                    "params": params.to_json(),
                    "m": j::int(m),
                    "n": j::int(n),
                    "F": j::int(&mem.f),
                    "disc_core": j::int(&mem.disc_core),
                    "e": mem.curve.to_json(),
                    "model": family::MODEL_NOTE,
                    "taut_point": mem.taut_point.to_json(),
                }))?,
                Format::Csv => {
                    let [e1, e2, e3] = mem.curve.roots();
                    em.csv_row(&[
                        m.to_string(),
                        n.to_string(),
                        mem.f.to_string(),
                        mem.disc_core.to_string(),
                        e1.to_string(),
                        e2.to_string(),
                        e3.to_string(),
                        mem.taut_point.to_string(),
                    ])?
                }
            }
        }
        em.flush()?;
        return Ok(Outcome::Success);
    }

    json_only(format, "a certification report")?;
    let cfg = PipelineConfig { m_range, n_range, prime_filter: !a.all_pairs, search_height: a.height.into(), budget };
    let reports = family::rank_one_pipeline(&params, &cfg).map_err(family_failure)?;
    let mut em = Emitter::new(out, format, manifest)?;
    for r in &reports {
        em.record(&r.to_json())?;
    }
    em.flush()?;
    let certified = reports.iter().filter(|r| r.certified).count();
    Ok(if reports.is_empty() || certified > 0 { Outcome::Success } else { Outcome::InconclusiveOnly })
}
