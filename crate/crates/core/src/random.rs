//! Seeded generators of random expressions and random 3-dimensional frame
//! structures, used by the property tests and the acceptance suite.
//!
//! Expressions are built so that every node is finite and smooth on
//! `[−1, 1]^m`: products take a `tanh` factor, divisions have denominator
//! `3/2 + u²`, `ln` and `sqrt` act on `1 + u²`, and `exp`, `sinh`, `cosh`
//! act on `tanh(u)`. Values therefore stay below `2^depth · 2` in size.
//!
//! Frame entries are quadratic polynomials plus one `sinh` and one `cosh`
//! term. The constant parts form a matrix with `|det| ≥ 1/2`; a frame is
//! kept only if `|det E| ≥ 1/10` on a `5×5×5` grid over the box.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::Result;
use crate::expr::{parse, BinOp, Expr, Func, Node};
use crate::geometry::source::{ComponentFn, FrameSpec};
use crate::geometry::{Chart, Source};
use crate::paracontact::APCMStructure;
use crate::presets::split_frame_tensors;

/// Depth cap of generated expressions.
pub const MAX_DEPTH: usize = 6;
/// Minimum `|det E|` a generated frame has on the sampling grid.
pub const FRAME_DET_FLOOR: f64 = 0.1;

fn det3(a: &[f64]) -> f64 {
    DMatrix::from_row_slice(3, 3, a).determinant()
}

fn unary(f: Func, a: Node) -> Node {
    Node::Func(f, Box::new(a))
}

fn bin(op: BinOp, a: Node, b: Node) -> Node {
    Node::Bin(op, Box::new(a), Box::new(b))
}

fn one_plus_square(a: Node, c: f64) -> Node {
    bin(BinOp::Add, Node::Const(c), Node::Pow(Box::new(a), 2))
}

fn leaf<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Node {
    if rng.gen_bool(0.7) {
        Node::Var(rng.gen_range(0..m))
    } else {
        // three decimals so the text form round-trips exactly
        Node::constant((rng.gen_range(-2.0f64..2.0) * 1000.0).round() / 1000.0)
    }
}

/// Random expression tree over `m` coordinates with depth at most `depth`.
pub fn random_node<R: Rng + ?Sized>(rng: &mut R, m: usize, depth: usize) -> Node {
    if depth <= 1 || rng.gen_bool(0.2) {
        return leaf(rng, m);
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 => bin(BinOp::Add, random_node(rng, m, d), random_node(rng, m, d)),
        1 => bin(BinOp::Sub, random_node(rng, m, d), random_node(rng, m, d)),
        2 => bin(
            BinOp::Mul,
            unary(Func::Tanh, random_node(rng, m, d.saturating_sub(1).max(1))),
            random_node(rng, m, d),
        ),
        3 => bin(
            BinOp::Div,
            random_node(rng, m, d),
            one_plus_square(random_node(rng, m, d.saturating_sub(1).max(1)), 1.5),
        ),
        4 => Node::Pow(
            Box::new(unary(Func::Tanh, random_node(rng, m, d.saturating_sub(1).max(1)))),
            rng.gen_range(2..=3),
        ),
        5 => Node::Neg(Box::new(random_node(rng, m, d))),
        6 => unary(Func::Ln, one_plus_square(random_node(rng, m, d.saturating_sub(1).max(1)), 1.0)),
        7 => unary(Func::Sqrt, one_plus_square(random_node(rng, m, d.saturating_sub(1).max(1)), 1.0)),
        8 => {
            let f = [Func::Exp, Func::Sinh, Func::Cosh][rng.gen_range(0..3)];
            unary(f, unary(Func::Tanh, random_node(rng, m, d.saturating_sub(1).max(1))))
        }
        _ => unary(Func::Tanh, random_node(rng, m, d)),
    }
}

pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, coordinates: &[String], depth: usize) -> Expr {
    Expr::from_node(random_node(rng, coordinates.len(), depth.min(MAX_DEPTH)), coordinates)
}

fn coef<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    (rng.gen_range(-1.0..1.0) * scale * 1000.0).round() / 1000.0
}

/// `a + Σ b_k x_k + Σ c_kl x_k x_l + s·sinh(x_i) + t·cosh(x_j)` with the
/// constant term in `[−1, 1]` and the others in `[−1/5, 1/5]`.
fn frame_entry<R: Rng + ?Sized>(rng: &mut R, coords: &[String], constant: f64) -> String {
    let mut text = format!("{constant}");
    for x in coords {
        text += &format!(" + {}*{x}", coef(rng, 0.2));
    }
    for (k, x) in coords.iter().enumerate() {
        for y in &coords[k..] {
            text += &format!(" + {}*{x}*{y}", coef(rng, 0.2));
        }
    }
    let i = rng.gen_range(0..coords.len());
    let j = rng.gen_range(0..coords.len());
    text += &format!(" + {}*sinh({}) + {}*cosh({})", coef(rng, 0.2), coords[i], coef(rng, 0.2), coords[j]);
    text
}

/// A random almost paracontact metric structure on `[−1, 1]³` given by a
/// frame in which `(ĝ, φ̂, ξ̂, η̂)` have the split normal form.
pub fn random_frame_structure<R: Rng + ?Sized>(rng: &mut R) -> Result<APCMStructure> {
    let coords: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let grid: Vec<f64> = (0..5).map(|i| -1.0 + 0.5 * i as f64).collect();
    loop {
        let a: Vec<f64> = (0..9).map(|_| coef(rng, 1.0)).collect();
        if det3(&a).abs() < 0.5 {
            continue;
        }
        let e = a
            .iter()
            .map(|&c| parse(&frame_entry(rng, &coords, c), &coords))
            .collect::<std::result::Result<Vec<Expr>, _>>()?;
        let ok = grid.iter().all(|&x| {
            grid.iter().all(|&y| {
                grid.iter().all(|&z| {
                    let vals: Option<Vec<f64>> = e.iter().map(|ex| ex.eval(&[x, y, z]).ok()).collect();
                    vals.is_some_and(|v| det3(&v).abs() >= FRAME_DET_FLOOR)
                })
            })
        });
        if !ok {
            continue;
        }
        let (g_hat, phi_hat, xi_hat, eta_hat) = split_frame_tensors(1);
        let frame = FrameSpec {
            e: e.into_iter().map(ComponentFn::from).collect(),
            g_hat,
            phi_hat,
            xi_hat,
            eta_hat,
        };
        return APCMStructure::new(Chart::cube(coords, -1.0, 1.0)?, Source::Frame(frame));
    }
}
