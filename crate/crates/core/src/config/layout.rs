use serde::{Deserialize, Serialize};

use super::{Circle, Configuration, CycleSpec, Sign};
use crate::ratpoly::{int, rat, Rational};

/// Abstract nesting tree node with its prescriptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestNode {
    pub period: f64,
    pub multiplicity: u32,
    pub stability: Sign,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ForestNode>,
}

impl ForestNode {
    pub fn leaf(period: f64, multiplicity: u32, stability: Sign) -> Self {
        ForestNode { period, multiplicity, stability, children: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ForestNode::size).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingForest {
    pub roots: Vec<ForestNode>,
}

impl NestingForest {
    pub fn size(&self) -> usize {
        self.roots.iter().map(ForestNode::size).sum()
    }
}

/// Realizes a nesting forest as circles with rational data.
///
/// Roots are unit circles spaced 3 apart on the x axis. The `k` children of
/// a circle of radius `R` sit on its horizontal diameter with equal radii and
/// gaps of `R/10` (shrunk to `2R/(k+1)` beyond nine children so the row
/// always fits). Cycles are emitted in depth-first preorder.
pub fn layout_forest(f: &NestingForest) -> Configuration {
    let mut cycles = Vec::new();
    for (i, root) in f.roots.iter().enumerate() {
        let circle = Circle::new(int(3 * i as i64), int(0), int(1));
        place(root, circle, &mut cycles);
    }
    Configuration::new(cycles)
}

fn place(node: &ForestNode, circle: Circle, out: &mut Vec<CycleSpec>) {
    out.push(CycleSpec {
        circle: circle.clone(),
        period: node.period,
        multiplicity: node.multiplicity,
        interior_stability: node.stability,
    });
    let k = node.children.len();
    if k == 0 {
        return;
    }
    let big_r = &circle.radius;
    let margin = if k <= 9 { big_r * rat(1, 10) } else { big_r * rat(2, 10 * (k as i64 + 1)) };
    let kq = int(k as i64);
    // 2R = k * 2rho + (k + 1) * margin
    let rho: Rational = (big_r * int(2) - &margin * (&kq + int(1))) / (int(2) * &kq);
    let left = &circle.center.0 - big_r;
    for (i, child) in node.children.iter().enumerate() {
        let iq = int(i as i64);
        let cx = &left + &margin + &rho + &iq * (int(2) * &rho + &margin);
        place(child, Circle::new(cx, circle.center.1.clone(), rho.clone()), out);
    }
}
