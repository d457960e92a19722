//! Straight-line reference evaluator.
//!
//! Plain nested vectors, scalar loops, no caches and no shared helpers
//! with the library beyond reading instance data and the generator `R`.
//! Inputs are byte strings: bits are 0/1 and the extra symbol `0̄` is 2.

use kih::{ModMatrix, PrfInstance, Seed};

pub type M = Vec<Vec<u64>>;

pub const ZBAR: u8 = 2;

pub fn lift(m: &ModMatrix) -> M {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn flat(m: &M) -> Vec<u64> {
    m.iter().flatten().copied().collect()
}

pub fn add(a: &M, b: &M, q: u64) -> M {
    let mut out = a.clone();
    for i in 0..a.len() {
        for j in 0..a[0].len() {
            out[i][j] = (a[i][j] + b[i][j]) % q;
        }
    }
    out
}

pub fn sub(a: &M, b: &M, q: u64) -> M {
    let mut out = a.clone();
    for i in 0..a.len() {
        for j in 0..a[0].len() {
            out[i][j] = (a[i][j] + q - b[i][j]) % q;
        }
    }
    out
}

pub fn mul(a: &M, b: &M, q: u64) -> M {
    let (rows, inner, cols) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), inner);
    let mut out = vec![vec![0u64; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            let mut acc: u128 = 0;
            for k in 0..inner {
                acc = (acc + a[i][k] as u128 * b[k][j] as u128) % q as u128;
            }
            out[i][j] = acc as u64;
        }
    }
    out
}

pub fn transpose(a: &M) -> M {
    (0..a[0].len()).map(|j| (0..a.len()).map(|i| a[i][j]).collect()).collect()
}

fn bits_of_q(q: u64) -> usize {
    let mut l = 0;
    while (1u128 << l) < q as u128 {
        l += 1;
    }
    l
}

/// `G⁻¹(B)`: each entry becomes a column block `(0, b_0, …, b_{l−1})`.
pub fn decomp(b: &M, q: u64) -> M {
    let l = bits_of_q(q);
    let d = l + 1;
    let mut out = vec![vec![0u64; b[0].len()]; b.len() * d];
    for i in 0..b.len() {
        for j in 0..b[0].len() {
            for k in 0..l {
                out[i * d + 1 + k][j] = (b[i][j] >> k) & 1;
            }
        }
    }
    out
}

/// `G·X` over the integers, then mod `q`.
pub fn gadget_times(x: &M, q: u64) -> M {
    let d = bits_of_q(q) + 1;
    let n = x.len() / d;
    let mut out = vec![vec![0u64; x[0].len()]; n];
    for i in 0..n {
        for j in 0..x[0].len() {
            let mut v: u128 = 0;
            for k in 1..d {
                v += (x[i * d + k][j] as u128) << (k - 1);
            }
            out[i][j] = (v % q as u128) as u64;
        }
    }
    out
}

/// Nearest integer to `p·x/q`, halves rounded up, mod `p`.
pub fn round(x: u64, q: u64, p: u64) -> u64 {
    let num = 2 * p as u128 * x as u128 + q as u128;
    ((num / (2 * q as u128)) % p as u128) as u64
}

pub fn centered_abs(v: u64, m: u64) -> u64 {
    if 2 * v > m {
        m - v
    } else {
        v
    }
}

pub fn norm(a: &M, m: u64) -> u64 {
    a.iter().flatten().map(|&v| centered_abs(v, m)).max().unwrap()
}

pub fn parse(s: &str) -> Vec<u8> {
    s.chars()
        .map(|c| match c {
            '0' => 0,
            '1' => 1,
            'Z' | 'z' => ZBAR,
            other => panic!("bad symbol {other}"),
        })
        .collect()
}

pub fn almost_xor(x: &[u8], y: &[u8]) -> Vec<u8> {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| match (a, b) {
            (1, 1) => 0,
            (0, 0) => ZBAR,
            _ => 1,
        })
        .collect()
}

/// Tree as nested pairs of leaf counts, rebuilt from the literal form.
#[derive(Clone, Debug)]
pub enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn from_literal(s: &str) -> Shape {
        fn go(s: &[u8], pos: &mut usize) -> Shape {
            match s[*pos] {
                b'.' => {
                    *pos += 1;
                    Shape::Leaf
                }
                b'(' => {
                    *pos += 1;
                    let l = go(s, pos);
                    assert_eq!(s[*pos], b',');
                    *pos += 1;
                    let r = go(s, pos);
                    assert_eq!(s[*pos], b')');
                    *pos += 1;
                    Shape::Node(Box::new(l), Box::new(r))
                }
                c => panic!("unexpected {}", c as char),
            }
        }
        let mut pos = 0;
        let t = go(s.as_bytes(), &mut pos);
        assert_eq!(pos, s.len());
        t
    }

    pub fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(l, r) => l.leaves() + r.leaves(),
        }
    }
}

pub struct Oracle {
    pub q: u64,
    pub p: u64,
    pub a0: M,
    pub a1: M,
    pub shape: Shape,
    inst: PrfInstance,
}

impl Oracle {
    pub fn new(inst: &PrfInstance) -> Self {
        Oracle {
            q: inst.params().q(),
            p: inst.params().p(),
            a0: lift(inst.a0()),
            a1: lift(inst.a1()),
            shape: Shape::from_literal(&inst.tree().to_string()),
            inst: inst.clone(),
        }
    }

    fn sel(&self, s: u8) -> &M {
        if s == 1 {
            &self.a1
        } else {
            &self.a0
        }
    }

    fn walk(&self, t: &Shape, seg: &[u8], leaf: &dyn Fn(u8) -> M) -> M {
        match t {
            Shape::Leaf => leaf(seg[0]),
            Shape::Node(l, r) => {
                let k = l.leaves();
                let left = self.walk(l, &seg[..k], leaf);
                let right = self.walk(r, &seg[k..], leaf);
                let term = mul(self.sel(seg[0]), &decomp(&right, self.q), self.q);
                add(&left, &term, self.q)
            }
        }
    }

    pub fn a_t(&self, x: &[u8]) -> M {
        self.walk(&self.shape, x, &|b| self.sel(b).clone())
    }

    pub fn b_t(&self, s: &M, x: &[u8]) -> M {
        self.walk(&self.shape, x, &|b| add(self.sel(b), s, self.q))
    }

    pub fn c_t(&self, s: &M, z: &[u8]) -> M {
        let q = self.q;
        self.walk(&self.shape, z, &|sym| match sym {
            // A0 + B1, A1 + B1, A0 + B0
            1 => add(&add(&self.a0, &self.a1, q), s, q),
            0 => add(&add(&self.a1, &self.a1, q), s, q),
            _ => add(&add(&self.a0, &self.a0, q), s, q),
        })
    }

    pub fn r(&self, lh: &[u8]) -> M {
        let bits: String = lh.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        lift(&self.inst.prg_r(&bits.parse().unwrap()).unwrap())
    }

    fn family(&self, s: &M, lh: &[u8], right: M) -> M {
        let q = self.q;
        let first = mul(&transpose(s), &self.a_t(lh), q);
        let r0 = mul(&self.r(lh), self.sel(lh[0]), q);
        let second = mul(&r0, &decomp(&right, q), q);
        add(&first, &second, q)
            .iter()
            .map(|row| row.iter().map(|&v| round(v, q, self.p)).collect())
            .collect()
    }

    /// `F_S(y)`.
    pub fn f(&self, s: &M, y: &[u8]) -> M {
        let t = y.len() / 2;
        self.family(s, &y[..t], self.b_t(s, &y[t..]))
    }

    /// `F'_S(z0, z1)`.
    pub fn f_prime(&self, s: &M, z0: &[u8], z1: &[u8]) -> M {
        self.family(s, z0, self.c_t(s, z1))
    }

    pub fn defect(&self, s1: &M, s2: &M, x: &[u8], y: &[u8]) -> u64 {
        let t = x.len() / 2;
        assert_eq!(x[..t], y[..t]);
        let sum = add(&self.f(s1, x), &self.f(s2, y), self.p);
        let direct = self.f_prime(&add(s1, s2, self.q), &x[..t], &almost_xor(&x[t..], &y[t..]));
        norm(&sub(&sum, &direct, self.p), self.p)
    }

    /// Host update `body − F'_{dk}(i, dN)`.
    pub fn upd(&self, body: &M, dk: &M, i: &[u8], dn: &[u8]) -> M {
        sub(body, &self.f_prime(dk, i, dn), self.p)
    }
}

pub fn seed_matrix(s: &Seed) -> M {
    lift(s.matrix())
}

pub fn bits(b: &kih::BitString) -> Vec<u8> {
    b.bits().iter().map(|&x| x as u8).collect()
}

pub fn symbols(s: &kih::SymbolString) -> Vec<u8> {
    parse(&s.to_string())
}
