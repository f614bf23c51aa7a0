//! Argument-principle zero counting along closed contours.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum of `|f|` on the contour relative to its maximum.
pub const MIN_MODULUS: f64 = 1e-10;

/// Largest phase change accepted between neighbouring samples before the
/// segment is subdivided.
const MAX_PHASE_STEP: f64 = PI / 4.0;
const MAX_REFINE_DEPTH: u32 = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    Circle {
        center: Complex64,
        radius: f64,
    },
    /// Closed polyline; the last vertex connects back to the first.
    Polyline(Vec<Complex64>),
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64) -> Contour {
        Contour::Circle { center, radius }
    }

    /// Counter-clockwise axis-aligned rectangle.
    pub fn rectangle(lo: Complex64, hi: Complex64) -> Contour {
        Contour::Polyline(vec![lo, Complex64::new(hi.re, lo.im), hi, Complex64::new(lo.re, hi.im)])
    }

    /// Point at curve parameter `s` in `[0, 1)`, positively oriented.
    pub fn point_at(&self, s: f64) -> Complex64 {
        match self {
            Contour::Circle { center, radius } => center + Complex64::from_polar(*radius, 2.0 * PI * s),
            Contour::Polyline(vertices) => {
                let lengths: Vec<f64> = (0..vertices.len())
                    .map(|k| (vertices[(k + 1) % vertices.len()] - vertices[k]).norm())
                    .collect();
                let total: f64 = lengths.iter().sum();
                let mut target = s.rem_euclid(1.0) * total;
                for (k, len) in lengths.iter().enumerate() {
                    if target <= *len || k + 1 == lengths.len() {
                        let a = vertices[k];
                        let b = vertices[(k + 1) % vertices.len()];
                        let t = if *len > 0.0 { target / len } else { 0.0 };
                        return a + (b - a) * t;
                    }
                    target -= len;
                }
                vertices[0]
            }
        }
    }
}

/// Winding number of `f` around the origin as `z` traverses `contour`.
///
/// With `f` analytic inside (no poles) this equals the number of zeros
/// enclosed, counted with multiplicity.
pub fn winding_number<F>(f: F, contour: &Contour, nodes: usize) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let nodes = nodes.max(8);
    let params: Vec<f64> = (0..nodes).map(|k| k as f64 / nodes as f64).collect();
    let values = params
        .iter()
        .map(|&s| f(contour.point_at(s)))
        .collect::<Result<Vec<_>>>()?;
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    // also rejects NaN
    if min.partial_cmp(&(MIN_MODULUS * max)) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::ContourTooClose { modulus: min / max });
    }
    let mut total = 0.0;
    for k in 0..nodes {
        let s0 = params[k];
        let s1 = if k + 1 == nodes { 1.0 } else { params[k + 1] };
        let v1 = values[(k + 1) % nodes];
        total += phase_change(&f, contour, (s0, values[k]), (s1, v1), 0, MIN_MODULUS * max)?;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.05 {
        return Err(Error::ContourUndersampled {
            jump: (turns - rounded).abs() * 2.0 * PI,
        });
    }
    Ok(rounded as i64)
}

fn phase_change<F>(
    f: &F,
    contour: &Contour,
    (s0, v0): (f64, Complex64),
    (s1, v1): (f64, Complex64),
    depth: u32,
    floor: f64,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let step = (v1 / v0).arg();
    if step.abs() <= MAX_PHASE_STEP {
        return Ok(step);
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(Error::ContourUndersampled { jump: step.abs() });
    }
    let sm = 0.5 * (s0 + s1);
    let vm = f(contour.point_at(sm))?;
    if vm.norm() <= floor {
        return Err(Error::ContourTooClose { modulus: vm.norm() });
    }
    Ok(phase_change(f, contour, (s0, v0), (sm, vm), depth + 1, floor)?
        + phase_change(f, contour, (sm, vm), (s1, v1), depth + 1, floor)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Contour {
        Contour::circle(Complex64::new(0.0, 0.0), 1.0)
    }

    #[test]
    fn identity_winds_once() {
        assert_eq!(winding_number(Ok, &unit(), 64).unwrap(), 1);
    }

    #[test]
    fn square_winds_twice() {
        assert_eq!(winding_number(|z| Ok(z * z), &unit(), 64).unwrap(), 2);
    }

    #[test]
    fn pole_counts_negative() {
        let w = winding_number(|z| Ok(z.inv()), &unit(), 64).unwrap();
        assert_eq!(w, -1);
    }

    #[test]
    fn rectangle_encloses_zero() {
        let rect = Contour::rectangle(Complex64::new(-1.0, -0.5), Complex64::new(2.0, 0.5));
        let f = |z: Complex64| Ok((z - 1.5) * (z + 3.0));
        assert_eq!(winding_number(f, &rect, 40).unwrap(), 1);
    }

    #[test]
    fn high_frequency_refines() {
        let f = |z: Complex64| Ok(z.powi(17));
        assert_eq!(winding_number(f, &unit(), 24).unwrap(), 17);
    }

    #[test]
    fn guard_trips_near_zero() {
        let f = |z: Complex64| Ok(z - 1.0);
        assert!(matches!(
            winding_number(f, &unit(), 64),
            Err(Error::ContourTooClose { .. })
        ));
    }
}
