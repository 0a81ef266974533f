//! Exact rational arithmetic for the 2x2 worked instances.

use num_rational::Ratio;

pub type Q = Ratio<i64>;
pub type M2 = [[Q; 2]; 2];
pub type V2 = [Q; 2];

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn int(n: i64) -> Q {
    Ratio::from_integer(n)
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn eye() -> M2 {
    [[int(1), int(0)], [int(0), int(1)]]
}

pub fn add(a: &M2, b: &M2, s: Q) -> M2 {
    let mut c = *a;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][j] + s * b[i][j];
        }
    }
    c
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[int(0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn apply(a: &M2, v: &V2) -> V2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn dot(u: &V2, v: &V2) -> Q {
    u[0] * v[0] + u[1] * v[1]
}

pub fn inv(a: &M2) -> M2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    assert!(det != int(0), "singular rational matrix");
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

/// Completion of the column `B e1 = (a, c)` with `e2`-entry `t`.
pub fn completion(a: Q, c: Q, t: Q) -> M2 {
    [[a, c], [c, t]]
}

/// `e2`-entries of `B_mu` and `B_M`: the Schur complements of `I + B`, `I - B` vanish.
pub fn extreme_entries(a: Q, c: Q) -> (Q, Q) {
    let lower = -int(1) + c * c / (int(1) + a);
    let upper = int(1) - c * c / (int(1) - a);
    (lower, upper)
}

/// Exact data of a 2x2 instance with domain `span e1`.
pub struct Instance2 {
    pub b_mu: M2,
    pub b_max: M2,
    /// `e2`-entry of `B_M - B_mu`.
    pub gap: Q,
}

impl Instance2 {
    pub fn new(a: Q, c: Q) -> Self {
        let (lo, hi) = extreme_entries(a, c);
        Self { b_mu: completion(a, c, lo), b_max: completion(a, c, hi), gap: hi - lo }
    }

    /// `1 + gap [(B_mu - l)^{-1}]_{22}`.
    pub fn q0(&self, l: Q) -> Q {
        int(1) + self.gap * inv(&add(&self.b_mu, &eye(), -l))[1][1]
    }

    /// `(I - B_M)(I + B_M)^{-1}` when `I + B_M` is invertible.
    pub fn s_k(&self) -> M2 {
        mul(&add(&eye(), &self.b_max, int(-1)), &inv(&add(&eye(), &self.b_max, int(1))))
    }

    /// `(S_F + 1)(S_F - l)^{-1} = 2((1 - l) - (1 + l) B_mu)^{-1}`.
    pub fn shift_factor(&self, l: Q) -> M2 {
        let zero = [[int(0); 2]; 2];
        let base = add(&add(&zero, &eye(), int(1) - l), &self.b_mu, -(int(1) + l));
        add(&zero, &inv(&base), int(2))
    }

    /// `-1 + (l + 1)/2 gap [(S_F + 1)(S_F - l)^{-1}]_{22}`.
    pub fn calq0(&self, l: Q) -> Q {
        -int(1) + (l + int(1)) / int(2) * self.gap * self.shift_factor(l)[1][1]
    }
}

/// Boundary data of the pair `(B_mu, B_M)` in the frame `span(B_mu-range) + span e2`.
pub struct Boundary2 {
    pub inst: Instance2,
    pub s_k: M2,
    /// Row vector of the canonical `Gamma0`.
    pub gamma0: V2,
    /// Carrier direction of `S_F` and its image under the operator part.
    pub carrier: V2,
    pub t_carrier: V2,
}

impl Boundary2 {
    pub fn new(a: Q, c: Q) -> Self {
        let inst = Instance2::new(a, c);
        let s_k = inst.s_k();
        let e = add(&s_k, &eye(), int(1));
        let gamma0 = [e[1][0] / e[1][1], int(1)];
        let ipb = add(&eye(), &inst.b_mu, int(1));
        let imb = add(&eye(), &inst.b_mu, int(-1));
        let carrier = [ipb[0][0], ipb[1][0]];
        let image = [imb[0][0], imb[1][0]];
        let coef = dot(&image, &carrier) / dot(&carrier, &carrier);
        let t_carrier = [coef * carrier[0], coef * carrier[1]];
        Self { inst, s_k, gamma0, carrier, t_carrier }
    }

    /// `T u` for `u = alpha carrier + beta e2`.
    pub fn t(&self, u: &V2) -> V2 {
        let alpha = u[0] / self.carrier[0];
        let beta = u[1] - alpha * self.carrier[1];
        [alpha * self.t_carrier[0], alpha * self.t_carrier[1] - beta]
    }

    /// `Gamma1 u = e2 . (Tu - S_K u)`.
    pub fn gamma1(&self, u: &V2) -> Q {
        self.t(u)[1] - apply(&self.s_k, u)[1]
    }

    /// `y` with `Gamma1 (1, y) = 0`.
    pub fn gamma1_kernel(&self) -> Q {
        let at = |y: Q| self.gamma1(&[int(1), y]);
        let (g0, g1) = (at(int(0)), at(int(1)));
        -g0 / (g1 - g0)
    }

    pub fn gamma0_field(&self, z: Q) -> V2 {
        let sf = self.inst.shift_factor(z);
        let m = [sf[0][1], sf[1][1]];
        let g = dot(&self.gamma0, &m);
        [m[0] / g, m[1] / g]
    }

    /// `M(z) = e2 . (z - S_K) Gamma0(z)`.
    pub fn weyl(&self, z: Q) -> Q {
        let g = self.gamma0_field(z);
        z * g[1] - apply(&self.s_k, &g)[1]
    }

    pub fn w_minus_one(&self) -> Q {
        self.s_k[1][1]
    }
}
