//! Sorted-abscissa lookup over an eigenvalue prefix.
//!
//! Points are kept sorted by real part; ball and nearest-neighbour queries
//! scan only the slab `|re - center.re| < radius`. The shipped spectra are
//! either one-dimensional or close to uniform in the plane, so slabs stay
//! short.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct PointIndex {
    /// (re, im, 1-based index), sorted by `re`.
    sorted: Vec<(f64, f64, usize)>,
}

impl PointIndex {
    /// Index `points[k]` as eigenvalue number `k + 1`.
    pub fn new(points: &[Complex64]) -> Self {
        let mut sorted: Vec<(f64, f64, usize)> = points.iter().enumerate().map(|(k, p)| (p.re, p.im, k + 1)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        Self { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    fn lower_bound(&self, x: f64) -> usize {
        self.sorted.partition_point(|p| p.0 < x)
    }

    /// Every indexed point with `|p - center| < radius`, as (index, point).
    pub fn in_ball(&self, center: Complex64, radius: f64) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let start = self.lower_bound(center.re - radius);
        self.sorted[start..]
            .iter()
            .take_while(move |p| p.0 <= center.re + radius)
            .filter_map(move |&(x, y, i)| {
                let p = Complex64::new(x, y);
                ((p - center).norm() < radius).then_some((i, p))
            })
    }

    /// Smallest index in the open ball accepted by `usable`.
    pub fn first_in_ball(&self, center: Complex64, radius: f64, usable: impl Fn(usize) -> bool) -> Option<usize> {
        self.in_ball(center, radius).filter(|&(i, _)| usable(i)).map(|(i, _)| i).min()
    }

    /// Nearest indexed point to `z`, skipping index `skip` (if given).
    pub fn nearest(&self, z: Complex64, skip: Option<usize>) -> Option<(usize, f64)> {
        if self.sorted.is_empty() {
            return None;
        }
        let mid = self.lower_bound(z.re);
        let mut best: Option<(usize, f64)> = None;
        let consider = |&(x, y, i): &(f64, f64, usize), best: &mut Option<(usize, f64)>| {
            if Some(i) == skip {
                return true;
            }
            let dx = (x - z.re).abs();
            if let Some((_, d)) = *best {
                if dx > d {
                    return false;
                }
            }
            let d = (Complex64::new(x, y) - z).norm();
            match *best {
                Some((bi, bd)) if d > bd || (d == bd && i > bi) => {}
                _ => *best = Some((i, d)),
            }
            true
        };
        for p in self.sorted[mid..].iter() {
            if !consider(p, &mut best) {
                break;
            }
        }
        for p in self.sorted[..mid].iter().rev() {
            if !consider(p, &mut best) {
                break;
            }
        }
        best
    }

    /// Number of indexed points within `radius` of `z` (open ball), skipping `skip`.
    pub fn count_within(&self, z: Complex64, radius: f64, skip: Option<usize>) -> usize {
        self.in_ball(z, radius).filter(|&(i, _)| Some(i) != skip).count()
    }
}
