//! Sampling oracle for tiny instances, independent of the splitting solver.

use crate::error::{Error, Result};
use crate::numerics::{norm2, DenseMatrix, NullspaceProjector, RngStream};
use crate::problem::{ObjectiveSpec, ProblemInstance};

const MAX_DIM: usize = 8;
const POLISH_CANDIDATES: usize = 16;
const POLISH_STEPS: usize = 2_000;
const DYKSTRA_SWEEPS: usize = 200;
const FEAS_TOL: f64 = 1e-10;

/// One affine face `{Ax = a, B_S x = b_S}` of the polyhedral part.
struct Face {
    proj: NullspaceProjector,
    target: Vec<f64>,
}

/// Exact Euclidean projection onto `{Ax = a, Bx ≤ b}`: the nearest feasible
/// point among projections onto the affine hulls of all faces.
struct Polyhedron<'a> {
    inst: &'a ProblemInstance,
    faces: Vec<Face>,
}

impl<'a> Polyhedron<'a> {
    fn new(inst: &'a ProblemInstance) -> Result<Self> {
        let (n, m1, m2) = (inst.n, inst.m1(), inst.m2());
        let mut faces = Vec::new();
        for mask in 0u32..(1u32 << m2) {
            let active: Vec<usize> = (0..m2).filter(|i| mask >> i & 1 == 1).collect();
            if m1 + active.len() > n {
                continue;
            }
            let rows = inst.a_mat.vstack(&inst.b_mat.select_rows(&active))?;
            let rows = if rows.rows() == 0 { DenseMatrix::zeros(0, n) } else { rows };
            let Ok(proj) = NullspaceProjector::new(&rows) else {
                continue;
            };
            let mut target = inst.a_vec.clone();
            target.extend(active.iter().map(|&i| inst.b_vec[i]));
            faces.push(Face { proj, target });
        }
        Ok(Self { inst, faces })
    }

    fn feasible(&self, x: &[f64]) -> bool {
        let bx = self.inst.b_mat.matvec(x);
        bx.iter().zip(&self.inst.b_vec).all(|(v, b)| *v <= b + FEAS_TOL)
    }

    fn project(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for face in &self.faces {
            let p = face.proj.apply_affine(x, Some(&face.target));
            if !self.feasible(&p) {
                continue;
            }
            let d: f64 = p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, p));
            }
        }
        best.map(|(_, p)| p)
    }
}

fn scale_into_ball(x: &mut [f64], radius: f64) {
    let nrm = norm2(x);
    if nrm > radius {
        x.iter_mut().for_each(|v| *v *= radius / nrm);
    }
}

/// Projection onto the full feasible set. For homogeneous rows the
/// polyhedron is a cone and radial scaling of the cone projection is exact;
/// otherwise Dykstra alternates with the ball.
fn project_feasible(poly: &Polyhedron<'_>, x: &[f64], homogeneous: bool) -> Option<Vec<f64>> {
    let inst = poly.inst;
    if !inst.ball_bound {
        return poly.project(x);
    }
    let r = inst.ball_radius;
    if homogeneous {
        let mut p = poly.project(x)?;
        scale_into_ball(&mut p, r);
        return Some(p);
    }
    let n = x.len();
    let mut y = x.to_vec();
    let mut p_inc = vec![0.0; n];
    let mut q_inc = vec![0.0; n];
    let mut z = x.to_vec();
    for _ in 0..DYKSTRA_SWEEPS {
        let shifted: Vec<f64> = y.iter().zip(&p_inc).map(|(a, b)| a + b).collect();
        let w = poly.project(&shifted)?;
        for i in 0..n {
            p_inc[i] = shifted[i] - w[i];
        }
        let shifted: Vec<f64> = w.iter().zip(&q_inc).map(|(a, b)| a + b).collect();
        z = shifted.clone();
        scale_into_ball(&mut z, r);
        for i in 0..n {
            q_inc[i] = shifted[i] - z[i];
        }
        let moved: f64 = z.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
        y = z.clone();
        if moved < 1e-24 {
            break;
        }
    }
    let p = poly.project(&z)?;
    (norm2(&p) <= r + FEAS_TOL).then_some(p)
}

fn subgradient(obj: &ObjectiveSpec, x: &[f64]) -> Vec<f64> {
    match obj {
        ObjectiveSpec::PurelyLinear => vec![1.0; x.len()],
        ObjectiveSpec::GeneralLinear { c } => c.clone(),
        ObjectiveSpec::BpSplit { k } => {
            let split = x.len() - k;
            x.iter()
                .enumerate()
                .map(|(i, &v)| if i < split { v.signum() * (v != 0.0) as u8 as f64 } else { 1.0 })
                .collect()
        }
    }
}

/// Best objective over `budget` feasible points: uniform ball samples pushed
/// through the affine projector of `Ax = a`, rejected when `Bx ≰ b`, then the
/// best few polished by projected subgradient steps.
///
/// Every returned value is attained at a feasible point, so it bounds the
/// true minimum from above. Requires `n ≤ 8`.
pub fn brute_force_oracle(inst: &ProblemInstance, budget: usize, stream: &mut RngStream) -> Result<f64> {
    inst.check()?;
    if inst.n > MAX_DIM {
        return Err(Error::config(format!(
            "brute-force oracle supports n ≤ {MAX_DIM}, got {}",
            inst.n
        )));
    }
    if budget == 0 {
        return Err(Error::config("oracle budget must be positive"));
    }
    let n = inst.n;
    let homogeneous = inst.is_homogeneous();
    let radius = if inst.ball_bound { inst.ball_radius } else { 1.0 };
    let affine = NullspaceProjector::new(&inst.a_mat)?;
    let poly = Polyhedron::new(inst)?;

    let mut pool: Vec<(f64, Vec<f64>)> = Vec::with_capacity(POLISH_CANDIDATES + 1);
    let push = |f: f64, x: Vec<f64>, pool: &mut Vec<(f64, Vec<f64>)>| {
        if pool.len() < POLISH_CANDIDATES || f < pool[pool.len() - 1].0 {
            let at = pool.partition_point(|(v, _)| *v <= f);
            pool.insert(at, (f, x));
            pool.truncate(POLISH_CANDIDATES);
        }
    };
    if homogeneous {
        push(0.0, vec![0.0; n], &mut pool);
    }

    let mut dir = vec![0.0; n];
    let target = (inst.m1() > 0).then_some(inst.a_vec.as_slice());
    for _ in 0..budget {
        stream.fill_gaussian(&mut dir);
        let nrm = norm2(&dir);
        if nrm == 0.0 {
            continue;
        }
        let rad = radius * stream.uniform().powf(1.0 / n as f64);
        let raw: Vec<f64> = dir.iter().map(|v| v * rad / nrm).collect();
        let mut x = affine.apply_affine(&raw, target);
        if !poly.feasible(&x) {
            continue;
        }
        let f = inst.objective.evaluate(&x)?;
        if homogeneous {
            if inst.ball_bound {
                // on a cone, f < 0 is improved by pushing to the sphere
                let nx = norm2(&x);
                if f < 0.0 && nx > 0.0 {
                    x.iter_mut().for_each(|v| *v *= radius / nx);
                } else {
                    scale_into_ball(&mut x, radius);
                }
            }
        } else if inst.ball_bound && norm2(&x) > radius + FEAS_TOL {
            continue;
        }
        let f = inst.objective.evaluate(&x)?;
        push(f, x, &mut pool);
    }
    if pool.is_empty() {
        return Err(Error::Infeasible(format!(
            "no feasible point among {budget} oracle samples"
        )));
    }

    let mut best = pool[0].0;
    for (_, start) in &pool {
        let mut x = start.clone();
        for step in 0..POLISH_STEPS {
            let g = subgradient(&inst.objective, &x);
            let gn = norm2(&g).max(1e-300);
            let eta = 0.5 * radius / ((step + 1) as f64).sqrt() / gn;
            let trial: Vec<f64> = x.iter().zip(&g).map(|(v, d)| v - eta * d).collect();
            let Some(p) = project_feasible(&poly, &trial, homogeneous) else {
                break;
            };
            x = p;
            if certify_point(inst, &poly, &x) {
                best = best.min(inst.objective.evaluate(&x)?);
            }
        }
    }
    Ok(best)
}

fn certify_point(inst: &ProblemInstance, poly: &Polyhedron<'_>, x: &[f64]) -> bool {
    let ax = inst.a_mat.matvec(x);
    let eq_ok = ax.iter().zip(&inst.a_vec).all(|(v, a)| (v - a).abs() <= 1e-9);
    let ball_ok = !inst.ball_bound || norm2(x) <= inst.ball_radius + FEAS_TOL;
    eq_ok && ball_ok && poly.feasible(x)
}
