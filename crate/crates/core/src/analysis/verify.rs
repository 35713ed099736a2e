//! Certificate checking, seeded sampling, and the norm battery.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{Certificate, CertificateMode};
use crate::error::{Error, Result};
use crate::exact::{format_scalar, int, QVector, Scalar};
use crate::pivot::{run_simplex, NormSpec, PivotRuleSpec, ShadowSpec};
use crate::polytope::{
    cone_contains, enumerate_vertices, vertex_from_basis, HPolytope, SimplicialCone, VertexBasis,
    DEFAULT_VERTEX_CAP,
};

use super::parametric_walk;

/// Outcome of [`check_certificate`]: `ok` iff `reasons` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Verifies the certificate against `q`:
/// the rays at `a` (and at `b` when both ends are thinned) each have a
/// positive multiple in `D_w` (`D_c`); each segment point is strictly inside
/// its recorded cone; the recorded middle cones are the normal cones of
/// `q`; `ε` is the least ℓ∞ inradius; the points lie in order on the
/// segment from `w` to `c`.
pub fn check_certificate(
    q: &HPolytope,
    a: &VertexBasis,
    b: &VertexBasis,
    cert: &Certificate,
) -> CertificateCheck {
    let mut reasons = Vec::new();
    let alpha = cert.alpha;
    if cert.segment_points.len() != alpha + 1 || cert.cones.len() != alpha + 1 || alpha == 0 {
        reasons.push(format!(
            "alpha {alpha} does not match {} points and {} cones",
            cert.segment_points.len(),
            cert.cones.len()
        ));
        return CertificateCheck { ok: false, reasons };
    }
    let m = q.num_facets();
    let indices = cert
        .a
        .iter()
        .chain(&cert.b)
        .chain(cert.cut_facets.iter().flatten());
    if let Some(i) = indices
        .chain(cert.cones.iter().flat_map(|c| &c.tight))
        .find(|&&i| i >= m)
    {
        reasons.push(format!("facet index {i} out of range for {m} facets"));
        return CertificateCheck { ok: false, reasons };
    }
    if a.tight != cert.a || b.tight != cert.b {
        reasons.push("endpoint vertices differ from the recorded ones".into());
    }
    let two_sided = cert.mode == CertificateMode::TwoSided;
    let mut check_end =
        |v: &VertexBasis, ball: &crate::constructions::Ball, facets: &[usize], name: &str| {
            if vertex_from_basis(q, &v.tight).is_err() {
                reasons.push(format!(
                    "{name} = {:?} is not a vertex of the polytope",
                    v.tight
                ));
                return;
            }
            if v.tight != facets {
                reasons.push(format!(
                    "{name} is not tight exactly on the cut facets {facets:?}"
                ));
            }
            for &i in &v.tight {
                if !ball.contains_ray(q.normal(i)) {
                    reasons.push(format!(
                        "ray {i} at {name} has no positive multiple in the ball"
                    ));
                }
            }
        };
    check_end(a, &cert.d_w, &cert.cut_facets[0], "a");
    if two_sided {
        check_end(b, &cert.d_c, &cert.cut_facets[1], "b");
    } else if !cert.cut_facets[1].is_empty() {
        reasons.push("fixed-c certificate lists cuts at b".into());
    }

    let (first, last) = (&cert.segment_points[0], &cert.segment_points[alpha]);
    if &cert.d_w.center != first || &cert.d_c.center != last {
        reasons.push("ball centers are not the segment endpoints".into());
    }
    if cert.d_w.radius != cert.epsilon || cert.d_c.radius != cert.epsilon {
        reasons.push("ball radii differ from epsilon".into());
    }
    if let Err(msg) = check_on_segment(&cert.segment_points) {
        reasons.push(msg);
    }

    let mut min_r: Option<Scalar> = None;
    let mut seen = BTreeSet::new();
    for (i, (cone, pt)) in cert.cones.iter().zip(&cert.segment_points).enumerate() {
        if !seen.insert(cone.tight.clone()) {
            reasons.push(format!("cone {i} repeats an earlier vertex"));
        }
        let Ok(sc) = SimplicialCone::new(cone.rays.clone()) else {
            reasons.push(format!("cone {i} is not simplicial"));
            continue;
        };
        if !cone_contains(&sc, pt, true) {
            reasons.push(format!("segment point {i} is not strictly inside cone {i}"));
        }
        let r = sc.linf_inradius(pt);
        min_r = Some(match min_r {
            Some(m) if m <= r => m,
            _ => r,
        });
        let in_q = (0 < i && i < alpha) || (i == alpha && !two_sided);
        if in_q {
            let rows_match = cone.tight.len() == q.dim()
                && cone.tight.iter().all(|&j| j < q.num_facets())
                && q.matrix().select_rows(&cone.tight) == cone.rays;
            if !rows_match || vertex_from_basis(q, &cone.tight).is_err() {
                reasons.push(format!(
                    "cone {i} is not the normal cone of vertex {:?}",
                    cone.tight
                ));
            }
        }
    }
    match min_r {
        Some(r) if r == cert.epsilon => {}
        Some(r) => reasons.push(format!(
            "epsilon {} differs from the least inradius {}",
            format_scalar(&cert.epsilon),
            format_scalar(&r)
        )),
        None => {}
    }
    CertificateCheck {
        ok: reasons.is_empty(),
        reasons,
    }
}

/// `points[i] = λ_i points[0] + (1 - λ_i) points[last]` with λ strictly
/// decreasing from 1 to 0.
fn check_on_segment(points: &[QVector]) -> std::result::Result<(), String> {
    let (w, c) = (&points[0], &points[points.len() - 1]);
    let d = w.sub(c);
    let Some(j) = (0..d.dim()).find(|&j| !d[j].is_zero()) else {
        return Err("segment endpoints coincide".into());
    };
    let mut prev = int(1) + int(1);
    for (i, p) in points.iter().enumerate() {
        let lam = (&p[j] - &c[j]) / &d[j];
        if c.axpy(&lam, &d) != *p {
            return Err(format!("segment point {i} is off the segment"));
        }
        if lam >= prev {
            return Err(format!("segment point {i} is out of order"));
        }
        prev = lam;
    }
    if !prev.is_zero() {
        return Err("last segment point is not c".into());
    }
    Ok(())
}

/// Summary of a verification run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub target: usize,
    pub samples: usize,
    pub min_length: Option<usize>,
    pub max_length: Option<usize>,
    pub seed: u64,
    pub resampled: usize,
    pub failures: Vec<String>,
    /// `None` when no certificate is part of the check.
    pub certificate_ok: Option<bool>,
    #[serde(default)]
    pub runs: Vec<RunSummary>,
}

/// One labelled run inside a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub length: Option<usize>,
}

impl VerificationReport {
    pub fn new(instance: impl Into<String>, p: &HPolytope, target: usize, seed: u64) -> Self {
        VerificationReport {
            instance: instance.into(),
            n: p.dim(),
            m: p.num_facets(),
            target,
            samples: 0,
            min_length: None,
            max_length: None,
            seed,
            resampled: 0,
            failures: vec![],
            certificate_ok: None,
            runs: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.certificate_ok != Some(false)
    }

    pub fn record(&mut self, len: usize) {
        self.min_length = Some(self.min_length.map_or(len, |m| m.min(len)));
        self.max_length = Some(self.max_length.map_or(len, |m| m.max(len)));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: [&'static str; 8] = [
        "instance",
        "n",
        "m",
        "target",
        "samples",
        "min_length",
        "certificate_ok",
        "seed",
    ];

    /// One CSV row: instance, n, m, target, samples, min_length,
    /// certificate_ok, seed.
    pub fn to_csv_row(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(vec![]);
        let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            self.instance.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.target.to_string(),
            self.samples.to_string(),
            opt(self.min_length),
            self.certificate_ok
                .map(|b| b.to_string())
                .unwrap_or_default(),
            self.seed.to_string(),
        ])
        .expect("in-memory csv");
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }
}

fn random_in_cone(q: &HPolytope, v: &VertexBasis, rng: &mut impl Rng) -> QVector {
    v.tight.iter().fold(QVector::zeros(q.dim()), |acc, &i| {
        let p: i64 = rng.gen_range(1..=100);
        let d: i64 = rng.gen_range(1..=100);
        acc.axpy(&Scalar::new(p.into(), d.into()), q.normal(i))
    })
}

/// Attempts per sample before giving up on drawing a generic pair.
const MAX_RESAMPLES: usize = 50;

/// Draws `samples` objective pairs from the open cones at `a` and `b`
/// (only `w` in fixed-c mode) and walks each parametric path. Sample `i`
/// uses stream `i` of a ChaCha generator seeded with `seed`; non-generic
/// draws are redrawn and counted.
pub fn sample_shadow_paths(
    q: &HPolytope,
    a: &VertexBasis,
    b: &VertexBasis,
    cert: &Certificate,
    target: usize,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let check = check_certificate(q, a, b, cert);
    let mut report = VerificationReport::new(format!("{:?}", cert.mode), q, target, seed);
    report.certificate_ok = Some(check.ok);
    report
        .failures
        .extend(check.reasons.iter().map(|r| format!("certificate: {r}")));
    let fixed_c =
        (cert.mode == CertificateMode::FixedC).then(|| cert.segment_points[cert.alpha].clone());
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut attempt = 0;
        loop {
            let w = random_in_cone(q, a, &mut rng);
            let c = match &fixed_c {
                Some(c) => c.clone(),
                None => random_in_cone(q, b, &mut rng),
            };
            let outcome =
                ShadowSpec::parametric(w, c).and_then(|spec| parametric_walk(q, &spec, Some(a)));
            match outcome {
                Ok(path) => {
                    let len = path.record.length;
                    report.record(len);
                    if path.record.last().tight != b.tight {
                        report.failures.push(format!(
                            "sample {i} ended at {:?}",
                            path.record.last().tight
                        ));
                    } else if len < target {
                        report
                            .failures
                            .push(format!("sample {i} has length {len} < {target}"));
                    }
                    break;
                }
                Err(Error::NonGeneric(_)) if attempt < MAX_RESAMPLES => {
                    attempt += 1;
                    report.resampled += 1;
                }
                Err(e) => {
                    report.failures.push(format!("sample {i}: {e}"));
                    break;
                }
            }
        }
        report.samples += 1;
    }
    Ok(report)
}

/// Runs steepest edge under every norm from `start` and requires each run
/// to visit all vertices along one common vertex sequence.
pub fn all_norms_battery(
    p: &HPolytope,
    c: &QVector,
    start: &VertexBasis,
    norms: &[NormSpec],
) -> Result<VerificationReport> {
    for norm in norms {
        norm.check_regular(p.dim())?;
    }
    let target = enumerate_vertices(p, start, DEFAULT_VERTEX_CAP)?.len() - 1;
    let mut report = VerificationReport::new("norm-battery", p, target, 0);
    let mut reference: Option<(String, Vec<Vec<usize>>)> = None;
    for norm in norms {
        report.samples += 1;
        let label = norm.to_string();
        match run_simplex(
            p,
            c,
            start,
            &PivotRuleSpec::steepest(norm.clone()),
            target + 1,
        ) {
            Ok(rec) => {
                report.record(rec.length);
                report.runs.push(RunSummary {
                    label: label.clone(),
                    length: Some(rec.length),
                });
                if rec.length != target {
                    report
                        .failures
                        .push(format!("{label}: length {} != {target}", rec.length));
                }
                let seq = rec.tight_sequence();
                match &reference {
                    Some((first, r)) if *r != seq => report
                        .failures
                        .push(format!("{label}: vertex sequence differs from {first}")),
                    Some(_) => {}
                    None => reference = Some((label, seq)),
                }
            }
            Err(e) => {
                report.runs.push(RunSummary {
                    label: label.clone(),
                    length: None,
                });
                report.failures.push(format!("{label}: {e}"));
            }
        }
    }
    Ok(report)
}
