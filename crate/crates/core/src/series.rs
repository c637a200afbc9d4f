//! Potential and medium data, and the triangular coefficient table `V[n, α]`
//! that parametrizes the fundamental solutions.
//!
//! The table is filled column by column: off-diagonal entries of column α
//! come from the earlier columns of the same row, and the diagonal entry is
//! the residue of the pole of the α-th Fourier coefficient at `λ = -α/2`.

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::TableScalar;

/// `q(x) = Σ_{n=1}^{N} q_n e^{inx}` with a finite list of harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    harmonics: Vec<Complex64>,
}

impl Potential {
    /// `harmonics[k]` is `q_{k+1}`.
    pub fn new(harmonics: Vec<Complex64>) -> Result<Self> {
        if harmonics.iter().any(|q| !q.re.is_finite() || !q.im.is_finite()) {
            return Err(Error::InvalidInput("harmonic is not finite".into()));
        }
        Ok(Potential { harmonics })
    }

    pub fn zero() -> Self {
        Potential { harmonics: vec![] }
    }

    /// Builds a potential from `(n, q_n)` pairs; missing indices are zero.
    pub fn from_sparse(pairs: &[(usize, Complex64)]) -> Result<Self> {
        let top = pairs.iter().map(|(n, _)| *n).max().unwrap_or(0);
        let mut harmonics = vec![Complex64::new(0.0, 0.0); top];
        let mut seen = vec![false; top];
        for &(n, q) in pairs {
            if n == 0 {
                return Err(Error::InvalidInput(
                    "harmonic index must be at least 1".into(),
                ));
            }
            if seen[n - 1] {
                return Err(Error::InvalidInput(format!("duplicate harmonic n = {n}")));
            }
            seen[n - 1] = true;
            harmonics[n - 1] = q;
        }
        Potential::new(harmonics)
    }

    /// Highest harmonic index N (0 for the zero potential).
    pub fn order(&self) -> usize {
        self.harmonics.len()
    }

    pub fn harmonics(&self) -> &[Complex64] {
        &self.harmonics
    }

    /// `q_n`, zero outside `1..=N`.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.harmonics
            .get(n - 1)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.harmonics.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// `q(x)` at a (possibly complex) point.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let step = (Complex64::i() * x).exp();
        let mut wave = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for q in &self.harmonics {
            wave *= step;
            sum += q * wave;
        }
        sum
    }

    /// Default truncation order `max(2N, 24)`.
    pub fn default_truncation(&self) -> usize {
        (2 * self.order()).max(24)
    }
}

/// Piecewise-constant density: `ρ = 1` for `x ≥ 0`, `ρ = β²` for `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumProfile {
    beta: f64,
}

impl MediumProfile {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) || beta == 1.0 {
            return Err(Error::InvalidMedium(beta));
        }
        Ok(MediumProfile { beta })
    }

    /// Accepts `β = 1`. Used when evaluating models for recovered data,
    /// which may legitimately sit at or near a continuous medium.
    pub fn relaxed(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidMedium(beta));
        }
        Ok(MediumProfile { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self, x: f64) -> f64 {
        if x >= 0.0 {
            1.0
        } else {
            self.beta * self.beta
        }
    }
}

/// Triangular table `V[n, α]`, `1 ≤ n ≤ α ≤ A`, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct VTable<T = Complex64> {
    order: usize,
    entries: Vec<T>,
}

fn slot(n: usize, alpha: usize) -> usize {
    alpha * (alpha - 1) / 2 + (n - 1)
}

impl<T: TableScalar> VTable<T> {
    fn zeros(order: usize) -> Self {
        VTable {
            order,
            entries: vec![T::zero(); order * (order + 1) / 2],
        }
    }

    /// Truncation order A.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `V[n, α]`, or `None` outside the triangle.
    pub fn get(&self, n: usize, alpha: usize) -> Option<&T> {
        if n == 0 || n > alpha || alpha > self.order {
            None
        } else {
            Some(&self.entries[slot(n, alpha)])
        }
    }

    /// `V[n, α]` with zero outside the triangle.
    pub fn value(&self, n: usize, alpha: usize) -> T {
        self.get(n, alpha).cloned().unwrap_or_else(T::zero)
    }

    fn set(&mut self, n: usize, alpha: usize, v: T) {
        let k = slot(n, alpha);
        self.entries[k] = v;
    }

    /// `V[1,1], …, V[A,A]`.
    pub fn diagonal(&self) -> Vec<T> {
        (1..=self.order).map(|n| self.value(n, n)).collect()
    }

    /// Iterates `(n, α, V[n, α])` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        (1..=self.order).flat_map(move |alpha| {
            (1..=alpha).map(move |n| (n, alpha, &self.entries[slot(n, alpha)]))
        })
    }

    pub fn to_c64(&self) -> VTable<Complex64> {
        VTable {
            order: self.order,
            entries: self.entries.iter().map(TableScalar::to_c64).collect(),
        }
    }

    /// Largest entrywise relative gap to `reference` (same order required).
    pub fn max_relative_gap(&self, reference: &Self) -> f64 {
        assert_eq!(self.order, reference.order, "table orders differ");
        self.entries
            .iter()
            .zip(&reference.entries)
            .map(|(a, b)| a.relative_gap(b))
            .fold(0.0, f64::max)
    }
}

impl VTable<Complex64> {
    /// Wraps explicit entries given as a dense `A × A` row-major closure.
    pub fn from_fn(order: usize, mut entry: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut table = VTable::zeros(order);
        for alpha in 1..=order {
            for n in 1..=alpha {
                table.set(n, alpha, entry(n, alpha));
            }
        }
        table
    }

    /// Largest `|ΔV|` over the table divided by the largest `|V|` of `reference`.
    pub fn normwise_gap(&self, reference: &Self) -> f64 {
        assert_eq!(self.order, reference.order, "table orders differ");
        let scale = reference.entries.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = self
            .entries
            .iter()
            .zip(&reference.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    /// `Σ_{α ≥ n} V[n, α]` for each row n, the series rows at `x = 0`.
    pub fn row_sums(&self) -> Vec<Complex64> {
        let mut sums = vec![Complex64::new(0.0, 0.0); self.order];
        for (n, _, v) in self.iter() {
            sums[n - 1] += v;
        }
        sums
    }
}

/// Fills the table from the harmonics of `q` up to order `order`.
pub fn build_vtable(potential: &Potential, order: usize) -> Result<VTable> {
    build_vtable_in::<Complex64>(potential, order)
}

/// [`build_vtable`] carried out in an arbitrary table scalar.
pub fn build_vtable_in<T: TableScalar>(potential: &Potential, order: usize) -> Result<VTable<T>> {
    if order == 0 {
        return Err(Error::InvalidInput(
            "truncation order must be positive".into(),
        ));
    }
    if order < potential.order() {
        warn!(
            "truncation order {order} is below the highest harmonic {}; higher harmonics are ignored",
            potential.order()
        );
    }
    let reach = potential.order().min(order);
    let q: Vec<T> = (0..=order)
        .map(|k| T::from_c64(potential.coefficient(k)))
        .collect();
    let int = |k: usize| T::from_int(k as i64);

    let mut table = VTable::<T>::zeros(order);
    for alpha in 1..=order {
        for n in 1..alpha {
            // α(α−n) V[n,α] = −Σ_{s=n}^{α−1} q_{α−s} V[n,s]; only s ≥ α−N contribute.
            let mut acc = T::zero();
            for s in n.max(alpha.saturating_sub(reach))..alpha {
                acc = acc + q[alpha - s].clone() * table.value(n, s);
            }
            let denom = int(alpha) * int(alpha - n);
            table.set(n, alpha, -acc / denom);
        }

        // Coefficients c_s of e^{i(s+μ)x} at μ = −α/2: s(s−α) c_s = −Σ_{r<s} q_{s−r} c_r, c_0 = 1.
        let mut c: Vec<T> = Vec::with_capacity(alpha);
        c.push(int(1));
        for s in 1..alpha {
            let mut acc = T::zero();
            for r in s.saturating_sub(reach)..s {
                acc = acc + q[s - r].clone() * c[r].clone();
            }
            let denom = -(int(s) * int(alpha - s));
            c.push(-acc / denom);
        }
        let mut acc = T::zero();
        for s in alpha.saturating_sub(reach)..alpha {
            acc = acc + q[alpha - s].clone() * c[s].clone();
        }
        table.set(alpha, alpha, -acc / int(alpha));
    }
    Ok(table)
}

/// Rebuilds the off-diagonal entries from the diagonal:
/// `V[n, n+k] = V[n,n] Σ_{m=1}^{k} V[m,k] / (m+n)`.
pub fn reconstruct_vtable(diagonal: &[Complex64], order: usize) -> Result<VTable> {
    reconstruct_vtable_in::<Complex64>(diagonal, order)
}

pub fn reconstruct_vtable_in<T: TableScalar>(diagonal: &[T], order: usize) -> Result<VTable<T>> {
    if order == 0 {
        return Err(Error::InvalidInput(
            "truncation order must be positive".into(),
        ));
    }
    if diagonal.len() != order {
        return Err(Error::InvalidInput(format!(
            "diagonal has {} entries, expected {order}",
            diagonal.len()
        )));
    }
    let int = |k: usize| T::from_int(k as i64);
    let mut table = VTable::<T>::zeros(order);
    for (n, v) in diagonal.iter().enumerate() {
        table.set(n + 1, n + 1, v.clone());
    }
    for column in 2..=order {
        for n in 1..column {
            let k = column - n;
            let mut acc = T::zero();
            for m in 1..=k {
                acc = acc + table.value(m, k) / int(m + n);
            }
            let v = table.value(n, n) * acc;
            table.set(n, column, v);
        }
    }
    Ok(table)
}

/// `q_α = −α Σ_{n ≤ α} V[n, α]` for `α = 1..=A`.
pub fn q_from_vtable(table: &VTable) -> Potential {
    let mut harmonics = vec![Complex64::new(0.0, 0.0); table.order()];
    for (n, alpha, v) in table.iter() {
        let _ = n;
        harmonics[alpha - 1] += v;
    }
    for (k, q) in harmonics.iter_mut().enumerate() {
        *q *= -((k + 1) as f64);
    }
    Potential { harmonics }
}

/// Truncated convergence norm `Σ_n (1/n) Σ_α α |V[n, α]|` and the share of
/// it contributed by the last column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailNorm {
    pub total: f64,
    pub last_column: f64,
}

/// Threshold on `last_column / total` above which truncation is flagged.
pub const TRUNCATION_WARN_RATIO: f64 = 1e-8;

impl TailNorm {
    pub fn is_resolved(&self) -> bool {
        self.last_column <= TRUNCATION_WARN_RATIO * self.total
    }
}

pub fn tail_norm(table: &VTable) -> TailNorm {
    let order = table.order();
    let mut total = 0.0;
    let mut last_column = 0.0;
    for (n, alpha, v) in table.iter() {
        let term = alpha as f64 * v.norm() / n as f64;
        total += term;
        if alpha == order {
            last_column += term;
        }
    }
    TailNorm { total, last_column }
}

/// Builds the table and logs a warning if the last column is not negligible.
pub fn build_checked(potential: &Potential, order: usize) -> Result<(VTable, TailNorm)> {
    let table = build_vtable(potential, order)?;
    let norm = tail_norm(&table);
    if !norm.is_resolved() {
        warn!(
            "truncation A = {order} looks unresolved: last column contributes {:.3e} of {:.3e}",
            norm.last_column, norm.total
        );
    }
    Ok((table, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Wide512;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_q1() -> Potential {
        Potential::new(vec![c(1.0, 0.0)]).unwrap()
    }

    // Hand evaluation of the column recurrences for q = {q1 = 1}.
    fn hand_table() -> [(usize, usize, f64); 6] {
        [
            (1, 1, -1.0),
            (1, 2, 0.5),
            (2, 2, -0.5),
            (1, 3, -1.0 / 12.0),
            (2, 3, 1.0 / 6.0),
            (3, 3, -1.0 / 12.0),
        ]
    }

    #[test]
    fn zero_potential_gives_zero_table() {
        let t = build_vtable(&Potential::zero(), 3).unwrap();
        assert!(t.iter().all(|(_, _, v)| *v == c(0.0, 0.0)));
    }

    #[test]
    fn unit_first_harmonic_matches_hand_table() {
        let t = build_vtable(&unit_q1(), 3).unwrap();
        for (n, a, v) in hand_table() {
            assert!((t.value(n, a) - c(v, 0.0)).norm() <= 1e-14, "V[{n},{a}]");
        }
        assert_eq!(t.get(2, 1), None);
        assert_eq!(t.get(1, 4), None);
    }

    #[test]
    fn symbolic_single_harmonic_order_two() {
        let q1 = c(0.3, -1.7);
        let t = build_vtable(&Potential::new(vec![q1]).unwrap(), 2).unwrap();
        assert!((t.value(1, 1) + q1).norm() < 1e-15);
        assert!((t.value(1, 2) - q1 * q1 / 2.0).norm() < 1e-15);
        assert!((t.value(2, 2) + q1 * q1 / 2.0).norm() < 1e-15);
    }

    #[test]
    fn order_zero_is_rejected() {
        assert!(build_vtable(&unit_q1(), 0).is_err());
        assert!(reconstruct_vtable(&[], 0).is_err());
    }

    #[test]
    fn tail_norm_examples() {
        let zero = build_vtable(&Potential::zero(), 5).unwrap();
        assert_eq!(tail_norm(&zero).total, 0.0);
        let t = build_vtable(&unit_q1(), 2).unwrap();
        let norm = tail_norm(&t);
        assert!((norm.total - 2.5).abs() < 1e-15);
        // last column: (1/1)·2·(1/2) + (1/2)·2·(1/2)
        assert!((norm.last_column - 1.5).abs() < 1e-15);
    }

    #[test]
    fn reconstruct_hand_diagonal() {
        let d = [c(-1.0, 0.0), c(-0.5, 0.0), c(-1.0 / 12.0, 0.0)];
        let t = reconstruct_vtable(&d, 3).unwrap();
        for (n, a, v) in hand_table() {
            assert!((t.value(n, a) - c(v, 0.0)).norm() <= 1e-15, "V[{n},{a}]");
        }
        assert!(reconstruct_vtable(&d, 2).is_err());
    }

    #[test]
    fn reconstruct_trivial_cases() {
        let t = reconstruct_vtable(&[c(0.0, 0.0); 5], 5).unwrap();
        assert!(t.iter().all(|(_, _, v)| v.norm() == 0.0));
        let t = reconstruct_vtable(&[c(2.0, 1.0)], 1).unwrap();
        assert_eq!(t.value(1, 1), c(2.0, 1.0));
    }

    #[test]
    fn q_recovery_from_hand_table() {
        let t = build_vtable(&unit_q1(), 3).unwrap();
        let q = q_from_vtable(&t);
        assert!((q.coefficient(1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(q.coefficient(2).norm() < 1e-15);
        assert!(q.coefficient(3).norm() < 1e-15);
        let zero = q_from_vtable(&build_vtable(&Potential::zero(), 4).unwrap());
        assert!(zero.harmonics().iter().all(|q| q.norm() == 0.0));
    }

    #[test]
    fn sparse_potential_validation() {
        let p = Potential::from_sparse(&[(3, c(1.0, 0.0)), (1, c(0.0, 2.0))]).unwrap();
        assert_eq!(p.order(), 3);
        assert_eq!(p.coefficient(2), c(0.0, 0.0));
        assert!(Potential::from_sparse(&[(1, c(1.0, 0.0)), (1, c(2.0, 0.0))]).is_err());
        assert!(Potential::from_sparse(&[(0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn medium_validation() {
        assert!(MediumProfile::new(1.0).is_err());
        assert!(MediumProfile::new(0.0).is_err());
        assert!(MediumProfile::new(-2.0).is_err());
        assert!(MediumProfile::new(f64::NAN).is_err());
        let m = MediumProfile::new(2.0).unwrap();
        assert_eq!(m.rho(-0.1), 4.0);
        assert_eq!(m.rho(0.0), 1.0);
        assert!(MediumProfile::relaxed(1.0).is_ok());
    }

    #[test]
    fn wide_and_f64_builds_agree() {
        let p = Potential::new(vec![c(0.4, 0.3), c(-0.2, 0.9), c(0.0, -0.5)]).unwrap();
        let narrow = build_vtable(&p, 20).unwrap();
        let wide = build_vtable_in::<Wide512>(&p, 20).unwrap().to_c64();
        assert!(narrow.max_relative_gap(&wide) < 1e-13);
    }

    fn arb_potential(max_n: usize) -> impl Strategy<Value = Potential> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), 0..=max_n).prop_map(
            |v| Potential::new(v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
                .unwrap(),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn column_recurrences_hold(p in arb_potential(8), order in 1usize..30) {
            let t = build_vtable(&p, order).unwrap();
            let reach = p.order();
            for alpha in 1..=order {
                let mut col_abs = 0.0;
                let mut col = c(0.0, 0.0);
                for n in 1..=alpha {
                    col += t.value(n, alpha);
                    col_abs += t.value(n, alpha).norm();
                }
                for n in 1..alpha {
                    let v = t.value(n, alpha);
                    let mut sum = c(0.0, 0.0);
                    let mut sum_abs = 0.0;
                    for s in n..alpha {
                        let term = p.coefficient(alpha - s) * t.value(n, s);
                        sum += term;
                        sum_abs += term.norm();
                    }
                    let a = alpha as f64;
                    let resid = (a * (a - n as f64) * v + sum).norm();
                    prop_assert!(resid <= 1e-12 * (sum_abs + v.norm() * a * a + 1e-300));
                }
                let q = if alpha <= reach { p.coefficient(alpha) } else { c(0.0, 0.0) };
                let resid = (alpha as f64 * col + q).norm();
                prop_assert!(resid <= 1e-12 * (q.norm() + alpha as f64 * col_abs + 1e-300));
            }
        }

        #[test]
        fn q_round_trip(p in arb_potential(8), extra in 0usize..12) {
            let order = p.order().max(1) + extra;
            let back = q_from_vtable(&build_vtable(&p, order).unwrap());
            let scale = p.max_abs().max(1e-300);
            for k in 1..=order {
                prop_assert!((back.coefficient(k) - p.coefficient(k)).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn first_entry_is_minus_q1(p in arb_potential(8)) {
            let t = build_vtable(&p, 1).unwrap();
            prop_assert_eq!(t.value(1, 1), -p.coefficient(1));
        }

        #[test]
        fn tail_norm_grows_with_order(p in arb_potential(6), order in 1usize..25) {
            let a = tail_norm(&build_vtable(&p, order).unwrap()).total;
            let b = tail_norm(&build_vtable(&p, order + 1).unwrap()).total;
            prop_assert!(b >= a);
        }

        #[test]
        fn reconstruction_matches_forward_normwise(p in arb_potential(8), order in 1usize..41) {
            let fwd = build_vtable(&p, order).unwrap();
            let back = reconstruct_vtable(&fwd.diagonal(), order).unwrap();
            prop_assert!(back.normwise_gap(&fwd) <= 1e-12);
        }
    }
}
