use nalgebra::DMatrix;
use num_complex::Complex64;

/// Real polynomial, coefficients in ascending order (`coeffs[k]` multiplies `x^k`).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped, so `degree()` is the true degree.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    /// `sum |c_k x^k|`, the natural scale of rounding error in `eval(x)`.
    pub fn magnitude(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x.abs() + c.abs())
    }

    /// All complex roots.
    ///
    /// The variable is rescaled by the Fujiwara-type bound
    /// `s = max_k |c_k / c_n|^(1/(n-k))` so that the monic companion matrix has
    /// entries of order one, and the eigenvalues are then mapped back.
    /// Returns `None` if the eigenvalue iteration does not converge or the
    /// polynomial is identically zero.
    pub fn roots(&self) -> Option<Vec<Complex64>> {
        let n = self.degree();
        let lead = self.leading();
        if lead == 0.0 {
            return None;
        }
        match n {
            0 => return Some(Vec::new()),
            1 => return Some(vec![Complex64::new(-self.coeffs[0] / lead, 0.0)]),
            _ => {}
        }
        let scale = (0..n)
            .map(|k| (self.coeffs[k] / lead).abs().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max);
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };

        // monic coefficients in the scaled variable z = x / scale
        let monic: Vec<f64> = (0..n)
            .map(|k| self.coeffs[k] / (lead * scale.powi((n - k) as i32)))
            .collect();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for k in 0..n {
            companion[(k, n - 1)] = -monic[k];
        }
        let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000)?;
        Some(schur.complex_eigenvalues().iter().map(|z| z * scale).collect())
    }

    /// Newton polishing of a real root estimate. Stops when the residual no
    /// longer decreases, so it never makes a well-converged root worse.
    pub fn polish(&self, mut x: f64, max_steps: usize) -> f64 {
        let mut best = self.eval(x).abs();
        for _ in 0..max_steps {
            let (p, dp) = self.eval_with_derivative(x);
            if dp == 0.0 || p == 0.0 {
                break;
            }
            let next = x - p / dp;
            let r = self.eval(next).abs();
            if !(r < best) {
                break;
            }
            x = next;
            best = r;
        }
        x
    }
}
