use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowcut::analysis::{
    all_norms_battery, convex_hull, local_path_agreement, parametric_walk, sample_shadow_paths,
    shadow_polygon_capped, RunSummary, VerificationReport,
};
use shadowcut::constructions::{
    canonicalize_w_to_e1, compress, find_k_for_norm, fixed_c_variant, goldfarb_cube, klee_minty,
    many_from_one, random_regular_polyhedral, thin_cone, uniform_regular_k, vertex_cut, Ball,
    CertificateMode, CompressSpec, GoldfarbParams,
};
use shadowcut::exact::{format_scalar, int, parse_scalar, rat, to_f64};
use shadowcut::pivot::{maximize, run_simplex};
use shadowcut::polytope::{
    enumerate_vertices, find_vertex, is_simple, normal_cone, vertex_from_basis,
};
use shadowcut::{
    Convention, Error, HPolytope, InstanceBundle, NormSpec, PivotRuleSpec, QVector, Scalar,
    ShadowSpec, TiePolicy, VertexBasis,
};

use crate::io::{emit, read_bundle, read_certificate, write_text, CliError, CliResult};
use crate::svg;
use crate::{
    Cli, Command, GenerateArgs, GenerateKind, InfoArgs, PlotArgs, PlotKind, RunArgs, TieArg,
    TransformArgs, TransformOp, VerifyArgs, VerifyMode,
};

/// Largest dimension for the cube and Klee-Minty presets.
const PRESET_CAP: usize = 20;

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Generate(a) => generate(cli, a),
        Command::Transform(a) => transform(cli, a),
        Command::Run(a) => run(cli, a),
        Command::Verify(a) => verify(cli, a),
        Command::Plot(a) => plot(cli, a),
        Command::Info(a) => info(cli, a),
    }
}

fn say(cli: &Cli, msg: impl AsRef<str>) {
    if !cli.quiet {
        println!("{}", msg.as_ref());
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Core(Error::InvalidInput(msg.into()))
}

fn parse_vector(s: &str) -> CliResult<QVector> {
    Ok(QVector::parse_list(s)?)
}

fn parse_indices(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("bad facet index {t:?}")))
        })
        .collect()
}

fn parse_params(s: &str) -> CliResult<GoldfarbParams> {
    let parts: Vec<&str> = s.split(',').collect();
    let [e, d] = parts.as_slice() else {
        return Err(invalid("--params takes eps,delta"));
    };
    Ok(GoldfarbParams {
        eps: parse_scalar(e)?,
        delta: parse_scalar(d)?,
    })
}

fn need_shadow(b: &InstanceBundle) -> CliResult<ShadowSpec> {
    b.shadow_spec()?
        .ok_or_else(|| invalid("the bundle has no shadow direction w"))
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn ray_sum(p: &HPolytope, v: &VertexBasis) -> QVector {
    QVector::sum(v.tight.iter().map(|&i| p.normal(i))).expect("a vertex has tight facets")
}

fn generate(cli: &Cli, a: &GenerateArgs) -> CliResult<()> {
    let n = a.n;
    let bundle = match a.kind {
        GenerateKind::Goldfarb => {
            let params = a.params.as_deref().map(parse_params).transpose()?;
            let g = goldfarb_cube(n, params)?;
            let target = maximize(&g.polytope, &g.spec.c, &g.start)?;
            let mut b = InstanceBundle::new(
                g.polytope,
                g.spec.c.clone(),
                g.start.tight.clone(),
                "goldfarb",
            )
            .with_shadow(&g.spec)
            .param("n", n)
            .param("eps", format_scalar(&g.params.eps))
            .param("delta", format_scalar(&g.params.delta));
            b.target = Some(target.tight);
            b
        }
        GenerateKind::Cube | GenerateKind::KleeMinty => {
            if !(1..=PRESET_CAP).contains(&n) {
                return Err(Error::GenerationFailed(format!(
                    "dimension {n} is outside 1..={PRESET_CAP}"
                ))
                .into());
            }
            let (p, c, start, name) = if a.kind == GenerateKind::Cube {
                let c: QVector = (1..=n as i64).map(int).collect();
                let p = HPolytope::unit_cube(n);
                let start = vertex_from_basis(&p, &(0..n).collect::<Vec<_>>())?;
                (p, c, start, "cube")
            } else {
                let (p, c, start) = klee_minty(n)?;
                (p, c, start, "klee-minty")
            };
            let target = maximize(&p, &c, &start)?;
            let mut b = InstanceBundle::new(p, c, start.tight, name).param("n", n);
            b.target = Some(target.tight);
            b
        }
    };
    emit(a.out.as_deref(), &bundle.to_json())?;
    if let Some(out) = &a.out {
        say(
            cli,
            format!(
                "wrote {}: n = {n}, m = {}",
                out.display(),
                bundle.polytope.num_facets()
            ),
        );
    }
    Ok(())
}

fn pick_vertex(cli: &Cli, b: &InstanceBundle, a: &TransformArgs) -> CliResult<VertexBasis> {
    let p = &b.polytope;
    if let Some(t) = &a.tight {
        return Ok(vertex_from_basis(p, &parse_indices(t)?)?);
    }
    if let Some(coords) = &a.vertex {
        let x = parse_vector(coords)?;
        let all = enumerate_vertices(p, &find_vertex(p)?, cli.vertex_cap)?;
        return all
            .into_iter()
            .find(|v| v.point == x)
            .ok_or_else(|| invalid(format!("no vertex at {coords}")));
    }
    Ok(b.start_vertex()?)
}

/// Recomputes start and target after the polytope changed: the start is
/// the maximizer of the parametric `w` when the bundle has one, otherwise
/// the old start if it survived or the minimizer of `c`.
fn refresh_endpoints(b: &mut InstanceBundle) -> CliResult<()> {
    let p = &b.polytope;
    let seed = find_vertex(p)?;
    let start = match b.shadow_spec()? {
        Some(spec) => maximize(p, &spec.parametric_w(), &seed)?,
        None => match vertex_from_basis(p, &b.start) {
            Ok(v) => v,
            Err(_) => maximize(p, &b.c.neg(), &seed)?,
        },
    };
    b.target = Some(maximize(p, &b.c, &seed)?.tight);
    b.start = start.tight;
    Ok(())
}

fn transform(cli: &Cli, a: &TransformArgs) -> CliResult<()> {
    let mut b = read_bundle(&a.input)?;
    let p = b.polytope.clone();
    let note = match a.op {
        TransformOp::VertexCut => {
            let v = pick_vertex(cli, &b, a)?;
            let w = match &a.w {
                Some(s) => parse_vector(s)?,
                None => ray_sum(&p, &v),
            };
            let eps = a.eps.as_deref().map(parse_scalar).transpose()?;
            b.polytope = vertex_cut(&p, &v, &w, eps)?;
            refresh_endpoints(&mut b)?;
            format!("vertex-cut at {:?} along {w}", v.tight)
        }
        TransformOp::ThinCone => {
            let v = pick_vertex(cli, &b, a)?;
            let center = match &a.center {
                Some(s) => parse_vector(s)?,
                None => ray_sum(&p, &v),
            };
            let radius = match &a.radius {
                Some(r) => parse_scalar(r)?,
                None => normal_cone(&p, &v)?.linf_inradius(&center) / int(2),
            };
            let ball = Ball::new(center, radius)?;
            let (q, nv) = thin_cone(&p, &v, &ball)?;
            b.polytope = q;
            refresh_endpoints(&mut b)?;
            format!(
                "thin-cone at {:?} into {:?}, radius {}",
                v.tight,
                nv.tight,
                format_scalar(&ball.radius)
            )
        }
        TransformOp::ManyFromOne | TransformOp::FixedC => {
            let spec = need_shadow(&b)?;
            let cert_path = a
                .cert
                .as_deref()
                .ok_or_else(|| invalid("--cert is required for this transform"))?;
            let fixed = a.op == TransformOp::FixedC;
            let inst = if fixed {
                fixed_c_variant(&p, &spec)?
            } else {
                many_from_one(&p, &spec)?
            };
            write_text(cert_path, &inst.certificate.to_json())?;
            let rep = inst.representative_spec(fixed.then_some(&b.c))?;
            b.polytope = inst.polytope.clone();
            b.c = rep.c.clone();
            b.w = Some(rep.w.clone());
            b.w_convention = Convention::Parametric;
            b.start = inst.a.tight.clone();
            b.target = Some(inst.b.tight.clone());
            let name = if fixed { "fixed-c" } else { "many-from-one" };
            format!(
                "{name}: alpha = {}, epsilon = {}",
                inst.certificate.alpha,
                format_scalar(&inst.certificate.epsilon)
            )
        }
        TransformOp::Compress => {
            let spec = need_shadow(&b)?;
            let start = b.start_vertex()?;
            let k_arg =
                a.k.as_deref()
                    .ok_or_else(|| invalid("--k is required for compress"))?;
            let k = if k_arg == "auto" {
                let norm = NormSpec::parse(
                    a.norm
                        .as_deref()
                        .ok_or_else(|| invalid("--k auto needs --norm"))?,
                )?;
                let (k, rec) = find_k_for_norm(&p, &spec, &start, &norm)?;
                say(
                    cli,
                    format!(
                        "k = {} (steepest {norm} length {})",
                        format_scalar(&k),
                        rec.length
                    ),
                );
                k
            } else if k_arg == "uniform" {
                uniform_regular_k(&p, &spec, &start)?
            } else {
                parse_scalar(k_arg)?
            };
            let cs = CompressSpec::new(spec.to_projection().w, k.clone())?;
            let (q, c2) = compress(&p, &b.c, &cs)?;
            b.polytope = q;
            b.c = c2;
            b = b.param("k", format_scalar(&k));
            format!("compress with k = {}", format_scalar(&k))
        }
        TransformOp::Canonicalize => {
            let spec = need_shadow(&b)?.to_projection();
            let (q, spec2, t) = canonicalize_w_to_e1(&p, &spec)?;
            b.polytope = q;
            b.c = spec2.c.clone();
            b.w = Some(spec2.w.clone());
            b.w_convention = Convention::Projection;
            let rows: Vec<String> = t.rows().iter().map(|r| r.to_string()).collect();
            b = b.param("T", rows.join("; "));
            "canonicalize w to e1".to_string()
        }
    };
    b.metadata.chain.push(note.clone());
    b.validate()?;
    emit(a.out.as_deref(), &b.to_json())?;
    if a.out.is_some() {
        say(cli, format!("{note}; m = {}", b.polytope.num_facets()));
    }
    Ok(())
}

fn run(cli: &Cli, a: &RunArgs) -> CliResult<()> {
    let b = read_bundle(&a.input)?;
    let start = b.start_vertex()?;
    let shadow = b.shadow_spec()?;
    let policy = match a.tie {
        TieArg::Error => TiePolicy::Error,
        TieArg::Lowest => TiePolicy::LowestIndex,
    };
    let rule = PivotRuleSpec::parse(&a.rule, &b.c, shadow.as_ref())?.with_tie_policy(policy);
    let rec = run_simplex(&b.polytope, &b.c, &start, &rule, cli.step_cap)?;
    say(cli, format!("length {}", rec.length));
    if let Some(out) = &a.out {
        write_text(
            out,
            &serde_json::to_string_pretty(&rec).expect("path record serializes"),
        )?;
    }
    Ok(())
}

fn default_steepest_norms(n: usize) -> Vec<NormSpec> {
    let weights: QVector = (1..=n as i64).map(int).collect();
    vec![
        NormSpec::l1(),
        NormSpec::l2(),
        NormSpec::linf(),
        NormSpec::lp(rat(3, 2)).expect("valid exponent"),
        NormSpec::lp(int(3)).expect("valid exponent"),
        NormSpec::weighted_l1(weights).expect("positive weights"),
    ]
}

/// Regular norms for the battery: the built-in ones, then seeded random
/// polyhedral norms.
fn battery_norms(n: usize, count: usize, seed: u64) -> Vec<NormSpec> {
    let builtin = [
        NormSpec::l1(),
        NormSpec::l2(),
        NormSpec::linf(),
        NormSpec::lp(rat(3, 2)).expect("valid exponent"),
        NormSpec::lp(int(10)).expect("valid exponent"),
    ];
    let mut norms: Vec<NormSpec> = builtin
        .into_iter()
        .take(count)
        .map(NormSpec::require_regular)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while norms.len() < count {
        norms.push(random_regular_polyhedral(n, 3, &mut rng));
    }
    norms
}

fn verify(cli: &Cli, a: &VerifyArgs) -> CliResult<()> {
    let b = read_bundle(&a.input)?;
    let name = instance_name(&a.input);
    let p = &b.polytope;
    let seed = cli.seed;
    let mut report = match a.mode {
        VerifyMode::ManyFromOne | VerifyMode::FixedC => {
            let cert = read_certificate(
                a.cert
                    .as_deref()
                    .ok_or_else(|| invalid("--cert is required"))?,
            )?;
            let start = b.start_vertex()?;
            let end = b
                .target_vertex()?
                .ok_or_else(|| invalid("the bundle has no target vertex"))?;
            let mut r = sample_shadow_paths(p, &start, &end, &cert, cert.alpha, a.samples, seed)?;
            let want = if a.mode == VerifyMode::FixedC {
                CertificateMode::FixedC
            } else {
                CertificateMode::TwoSided
            };
            if cert.mode != want {
                r.failures.push(format!(
                    "certificate mode is {:?}, expected {want:?}",
                    cert.mode
                ));
            }
            r
        }
        VerifyMode::FindK => {
            let spec = need_shadow(&b)?;
            let start = b.start_vertex()?;
            let target = enumerate_vertices(p, &start, cli.vertex_cap)?.len() - 1;
            let norms = match &a.norm {
                Some(s) => vec![NormSpec::parse(s)?],
                None => default_steepest_norms(p.dim()),
            };
            let mut r = VerificationReport::new(name.clone(), p, target, seed);
            for norm in norms {
                r.samples += 1;
                match find_k_for_norm(p, &spec, &start, &norm) {
                    Ok((k, rec)) => {
                        r.record(rec.length);
                        r.runs.push(RunSummary {
                            label: format!("{norm} k={}", format_scalar(&k)),
                            length: Some(rec.length),
                        });
                        if rec.length != target {
                            r.failures
                                .push(format!("{norm}: length {} != {target}", rec.length));
                        }
                    }
                    Err(e) => {
                        r.runs.push(RunSummary {
                            label: norm.to_string(),
                            length: None,
                        });
                        r.failures.push(format!("{norm}: {e}"));
                    }
                }
            }
            r
        }
        VerifyMode::NormBattery => {
            let spec = need_shadow(&b)?.to_projection();
            let n = p.dim();
            let (q, spec2) = if spec.w == QVector::unit(n, 0) {
                (p.clone(), spec)
            } else {
                let (q, s2, _) = canonicalize_w_to_e1(p, &spec)?;
                (q, s2)
            };
            let start = vertex_from_basis(&q, &b.start)?;
            let k = uniform_regular_k(&q, &spec2, &start)?;
            let (qc, c2) = compress(
                &q,
                &spec2.c,
                &CompressSpec::new(spec2.w.clone(), k.clone())?,
            )?;
            let sc = vertex_from_basis(&qc, &start.tight)?;
            let mut r = all_norms_battery(&qc, &c2, &sc, &battery_norms(n, a.samples_norms, seed))?;
            r.seed = seed;
            say(cli, format!("compression factor k = {}", format_scalar(&k)));
            r
        }
        VerifyMode::Agreement => agreement(cli, &b, &name, seed)?,
    };
    report.instance = name;
    if let Some(path) = &a.report {
        write_text(path, &report.to_json())?;
    }
    if let Some(path) = &a.csv {
        let header = VerificationReport::CSV_HEADER.join(",");
        write_text(path, &format!("{header}\n{}", report.to_csv_row()))?;
    }
    let range = match (report.min_length, report.max_length) {
        (Some(lo), Some(hi)) => format!("lengths {lo}..={hi}"),
        _ => "no completed runs".to_string(),
    };
    if report.passed() {
        say(
            cli,
            format!(
                "pass: {range}, target {}, {} samples",
                report.target, report.samples
            ),
        );
        Ok(())
    } else {
        for f in &report.failures {
            say(cli, format!("  {f}"));
        }
        say(cli, format!("FAIL: {range}, target {}", report.target));
        Err(CliError::VerificationFailed(format!(
            "{} failure(s)",
            report.failures.len()
        )))
    }
}

/// Global parametric path against the local shadow rule, the hull bound,
/// and invariance of the shadow rule under positive rescalings of `w`.
fn agreement(
    cli: &Cli,
    b: &InstanceBundle,
    name: &str,
    seed: u64,
) -> CliResult<VerificationReport> {
    let p = &b.polytope;
    let spec = need_shadow(b)?;
    let start = b.start_vertex()?;
    let path = parametric_walk(p, &spec, Some(&start))?.record;
    let mut r = VerificationReport::new(name, p, path.length, seed);
    r.record(path.length);
    if !local_path_agreement(p, &spec, &start)? {
        r.failures
            .push("the local shadow rule leaves the parametric path".into());
    }
    let hull = shadow_polygon_capped(p, &spec, cli.vertex_cap)?;
    if path.length + 1 > hull.hull_size {
        r.failures.push(format!(
            "path has {} vertices but the shadow only {}",
            path.length + 1,
            hull.hull_size
        ));
    }
    let proj = spec.to_projection();
    let base = run_simplex(
        p,
        &proj.c,
        &start,
        &PivotRuleSpec::shadow(proj.clone()),
        cli.step_cap,
    )?
    .tight_sequence();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..10 {
        let s = Scalar::new(
            rng.gen_range(1..=100i64).into(),
            rng.gen_range(1..=100i64).into(),
        );
        let scaled = ShadowSpec::projection(proj.w.scale(&s), proj.c.clone())?;
        let seq = run_simplex(
            p,
            &proj.c,
            &start,
            &PivotRuleSpec::shadow(scaled),
            cli.step_cap,
        )?
        .tight_sequence();
        r.samples += 1;
        if seq != base {
            r.failures.push(format!(
                "rescaling {i} by {} changes the shadow path",
                format_scalar(&s)
            ));
        }
    }
    Ok(r)
}

fn plot(cli: &Cli, a: &PlotArgs) -> CliResult<()> {
    let b = read_bundle(&a.input)?;
    let p = &b.polytope;
    let vertices = enumerate_vertices(p, &find_vertex(p)?, cli.vertex_cap)?;
    let text = match a.kind {
        PlotKind::ShadowPolygon => {
            let w =
                b.w.as_ref()
                    .ok_or_else(|| invalid("the bundle has no shadow direction w"))?;
            let w = match b.w_convention {
                Convention::Projection => w.clone(),
                Convention::Parametric => w.neg(),
            };
            let pts: Vec<(Scalar, Scalar)> = vertices
                .iter()
                .map(|v| (w.dot(&v.point), b.c.dot(&v.point)))
                .collect();
            let hull = convex_hull(&pts)?;
            let path: Vec<usize> = match b.shadow_spec() {
                Ok(Some(spec)) => match parametric_walk(p, &spec, None) {
                    Ok(pp) => pp
                        .record
                        .vertices
                        .iter()
                        .filter_map(|v| vertices.iter().position(|u| u.tight == v.tight))
                        .collect(),
                    Err(_) => vec![],
                },
                _ => vec![],
            };
            let fpts: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (to_f64(x), to_f64(y))).collect();
            say(
                cli,
                format!("shadow polygon with {} hull vertices", hull.len()),
            );
            svg::shadow_polygon(&fpts, &hull, &path)
        }
        PlotKind::Fan2d => {
            if p.dim() != 2 {
                return Err(invalid(format!(
                    "fan-2d needs a planar polytope, got dimension {}",
                    p.dim()
                )));
            }
            let unit = |x: &QVector| {
                let (a, b) = (to_f64(&x[0]), to_f64(&x[1]));
                let len = a.hypot(b);
                (a / len, b / len)
            };
            let cones: Vec<[(f64, f64); 2]> = vertices
                .iter()
                .map(|v| [unit(p.normal(v.tight[0])), unit(p.normal(v.tight[1]))])
                .collect();
            let segment = match b.shadow_spec() {
                Ok(Some(spec)) => {
                    let spec = spec.to_parametric();
                    let (w, c) = (
                        (to_f64(&spec.w[0]), to_f64(&spec.w[1])),
                        (to_f64(&spec.c[0]), to_f64(&spec.c[1])),
                    );
                    let s = w.0.abs().max(w.1.abs()).max(c.0.abs()).max(c.1.abs());
                    Some(((w.0 / s, w.1 / s), (c.0 / s, c.1 / s)))
                }
                _ => None,
            };
            say(cli, format!("normal fan with {} cones", cones.len()));
            svg::fan(&cones, segment)
        }
    };
    write_text(&a.out, &text)
}

fn info(cli: &Cli, a: &InfoArgs) -> CliResult<()> {
    let b = read_bundle(&a.input)?;
    let p = &b.polytope;
    let count = p.validate(cli.vertex_cap)?;
    let mut lines = vec![
        format!(
            "dimension {}, facets {}, vertices {}",
            p.dim(),
            p.num_facets(),
            count
        ),
        format!("simple: {}", is_simple(p)),
        format!("c = {}", b.c),
    ];
    if let Some(w) = &b.w {
        lines.push(format!("w = {w} ({:?} convention)", b.w_convention));
    }
    lines.push(format!("start {:?}", b.start));
    if let Some(t) = &b.target {
        lines.push(format!("target {t:?}"));
    }
    let params: Vec<String> = b
        .metadata
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    lines.push(format!(
        "generator {} [{}]",
        b.metadata.generator,
        params.join(", ")
    ));
    for step in &b.metadata.chain {
        lines.push(format!("  then {step}"));
    }
    let (a_bits, b_bits) = p.bit_sizes();
    lines.push(format!("max bit sizes: A {a_bits}, b {b_bits}"));
    // info is the one command whose whole output is the summary
    println!("{}", lines.join("\n"));
    Ok(())
}
