use crate::config::{Circle, NestingIndex};
use crate::ratpoly::{int, Poly, Rational};

/// Polynomial auxiliaries shared by every builder.
#[derive(Debug, Clone)]
pub struct AuxiliaryBundle {
    pub circles: Vec<Circle>,
    pub multiplicities: Vec<u32>,
    pub primary: Vec<bool>,
    pub f: Vec<Poly>,
    pub fx: Vec<Poly>,
    pub fy: Vec<Poly>,
    /// `g_k`, present for primary circles only.
    pub g: Vec<Option<Poly>>,
    /// `Π_{j≠k} f_j`
    pub mu: Vec<Poly>,
    /// `Π_{j≠k} f_j^{m_j}`
    pub lambda: Vec<Poly>,
    pub a: Poly,
    pub a_m: Poly,
    pub b: Poly,
    pub bx: Poly,
    pub by: Poly,
    /// `Σ (m_k - 1)`
    pub big_lambda: u32,
}

/// `out[k] = Π_{j≠k} items[j]` via prefix and suffix products.
fn all_but_one(items: &[Poly]) -> (Vec<Poly>, Poly) {
    let n = items.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Poly::one());
    for it in items {
        let next = prefix.last().unwrap() * it;
        prefix.push(next);
    }
    let mut out = vec![Poly::zero(); n];
    let mut suffix = Poly::one();
    for k in (0..n).rev() {
        out[k] = &prefix[k] * &suffix;
        suffix = &suffix * &items[k];
    }
    (out, prefix.pop().unwrap())
}

impl AuxiliaryBundle {
    pub fn new(circles: &[Circle], multiplicities: &[u32], idx: &NestingIndex) -> Self {
        assert_eq!(circles.len(), multiplicities.len());
        assert_eq!(circles.len(), idx.len());
        let f: Vec<Poly> = circles.iter().map(Circle::implicit).collect();
        let fx = f.iter().map(Poly::diff_x).collect();
        let fy = f.iter().map(Poly::diff_y).collect();
        let primary: Vec<bool> = idx.entries.iter().map(|e| e.is_primary).collect();
        let g: Vec<Option<Poly>> =
            circles.iter().zip(&primary).map(|(c, &p)| p.then(|| c.squared_distance())).collect();
        let b = g.iter().flatten().fold(Poly::one(), |acc, gk| &acc * gk);
        let (mu, a) = all_but_one(&f);
        let powered: Vec<Poly> = f.iter().zip(multiplicities).map(|(fk, &m)| fk.pow(m)).collect();
        let (lambda, a_m) = all_but_one(&powered);
        AuxiliaryBundle {
            circles: circles.to_vec(),
            multiplicities: multiplicities.to_vec(),
            primary,
            f,
            fx,
            fy,
            g,
            mu,
            lambda,
            a,
            a_m,
            bx: b.diff_x(),
            by: b.diff_y(),
            b,
            big_lambda: multiplicities.iter().map(|m| m - 1).sum(),
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn primary_count(&self) -> u32 {
        self.primary.iter().filter(|&&p| p).count() as u32
    }

    pub fn big_lambda_q(&self) -> Rational {
        int(self.big_lambda as i64)
    }

    /// `F = Λ Σ λ_k ∂f_k/∂y`
    pub fn big_f(&self) -> Poly {
        self.weighted_sum(&self.fy).scale(&self.big_lambda_q())
    }

    /// `G = Λ Σ λ_k ∂f_k/∂x`
    pub fn big_g(&self) -> Poly {
        self.weighted_sum(&self.fx).scale(&self.big_lambda_q())
    }

    fn weighted_sum(&self, d: &[Poly]) -> Poly {
        self.lambda.iter().zip(d).fold(Poly::zero(), |acc, (l, dk)| &acc + &(l * dk))
    }

    /// `Π f_k^{m_k - 1}`
    pub fn excess_product(&self) -> Poly {
        self.f.iter().zip(&self.multiplicities).fold(Poly::one(), |acc, (fk, &m)| &acc * &fk.pow(m - 1))
    }
}

/// Hole factors `l_j = (x - a_j)^2 + (y - b_j)^2` and their product `L`.
pub fn hole_factors(points: &[(Rational, Rational)]) -> (Vec<Poly>, Poly) {
    let l: Vec<Poly> = points.iter().map(|(a, b)| Poly::circle(a, b, &int(0))).collect();
    let prod = l.iter().fold(Poly::one(), |acc, lj| &acc * lj);
    (l, prod)
}

/// Exact polynomial components of a field and its inverse integrating factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPolys {
    pub p: Poly,
    pub q: Poly,
    pub v: Poly,
}

/// `P = A(B_x - B_y) - B Σ τ_k μ_k f_k,y`, `Q = A(B_x + B_y) + B Σ τ_k μ_k f_k,x`.
pub fn xt_polys(aux: &AuxiliaryBundle, tau: &[Rational], include: &[bool]) -> FieldPolys {
    let mut sx = Poly::zero();
    let mut sy = Poly::zero();
    for k in (0..aux.len()).filter(|&k| include[k]) {
        let w = aux.mu[k].scale(&tau[k]);
        sx = &sx + &(&w * &aux.fx[k]);
        sy = &sy + &(&w * &aux.fy[k]);
    }
    FieldPolys {
        p: &(&aux.a * &(&aux.bx - &aux.by)) - &(&aux.b * &sy),
        q: &(&aux.a * &(&aux.bx + &aux.by)) + &(&aux.b * &sx),
        v: &aux.a * &aux.b,
    }
}

/// `P = P_LR Π f^{m-1} - B F`, `Q = Q_LR Π f^{m-1} + B G`.
pub fn xm_polys(aux: &AuxiliaryBundle) -> FieldPolys {
    let ones = vec![int(1); aux.len()];
    let lr = xt_polys(aux, &ones, &vec![true; aux.len()]);
    let e = aux.excess_product();
    FieldPolys {
        p: &(&lr.p * &e) - &(&aux.b * &aux.big_f()),
        q: &(&lr.q * &e) + &(&aux.b * &aux.big_g()),
        v: &aux.a_m * &aux.b,
    }
}

/// Expanded `X_Tm`: the `k`-th summand carries `τ_k λ_k (f_k^{m_k-1} + Λ)`.
/// Circles outside `include` are dropped from the sums but kept in `A_m`.
pub fn xtm_polys(aux: &AuxiliaryBundle, tau: &[Rational], include: &[bool]) -> FieldPolys {
    let big_lambda = Poly::constant(aux.big_lambda_q());
    let mut sx = Poly::zero();
    let mut sy = Poly::zero();
    for k in (0..aux.len()).filter(|&k| include[k]) {
        let c = &aux.f[k].pow(aux.multiplicities[k] - 1) + &big_lambda;
        let w = (&aux.lambda[k] * &c).scale(&tau[k]);
        sx = &sx + &(&w * &aux.fx[k]);
        sy = &sy + &(&w * &aux.fy[k]);
    }
    FieldPolys {
        p: &(&aux.a_m * &(&aux.bx - &aux.by)) - &(&aux.b * &sy),
        q: &(&aux.a_m * &(&aux.bx + &aux.by)) + &(&aux.b * &sx),
        v: &aux.a_m * &aux.b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::nesting_index;
    use crate::ratpoly::rat;

    fn pair() -> (Vec<Circle>, Vec<u32>) {
        (
            vec![Circle::new(int(0), int(0), int(3)), Circle::new(int(1), int(0), rat(1, 2)), Circle::new(int(6), int(1), int(1))],
            vec![2, 1, 3],
        )
    }

    #[test]
    fn reconstruction() {
        let (c, m) = pair();
        let idx = nesting_index(&c, &m).unwrap();
        let aux = AuxiliaryBundle::new(&c, &m, &idx);
        for k in 0..3 {
            assert_eq!(&aux.mu[k] * &aux.f[k], aux.a);
            assert_eq!(&aux.lambda[k] * &aux.f[k].pow(m[k]), aux.a_m);
        }
        assert_eq!(aux.big_lambda, 3);
        // circle 0 encloses circle 1, so only 1 and 2 are primary
        assert_eq!(aux.b, &c[1].squared_distance() * &c[2].squared_distance());
        assert_eq!(&aux.a * &aux.excess_product(), aux.a_m);
    }

    #[test]
    fn three_builders_agree() {
        let (c, m) = pair();
        let idx = nesting_index(&c, &m).unwrap();
        let aux = AuxiliaryBundle::new(&c, &m, &idx);
        let all = vec![true; 3];
        let ones = vec![int(1); 3];
        assert_eq!(xtm_polys(&aux, &ones, &all), xm_polys(&aux));
        let simple = AuxiliaryBundle::new(&c, &[1, 1, 1], &idx);
        let tau = vec![rat(3, 2), int(2), rat(1, 7)];
        assert_eq!(xtm_polys(&simple, &tau, &all), xt_polys(&simple, &tau, &all));
    }

    #[test]
    fn holes() {
        let (l, prod) = hole_factors(&[(int(2), int(0)), (int(0), int(1))]);
        assert_eq!(l.len(), 2);
        assert_eq!(prod.degree(), Some(4));
        assert_eq!(prod.eval_exact(&int(2), &int(0)), int(0));
    }
}
