//! Combinatorics of the pentagon 12345: triangles, the five flips and the
//! triangulations they connect.
//!
//! Stacked bases always list triangles by increasing vertex sum, which is
//! the order used throughout the crate:
//!
//! ```text
//! (124, 234, 145) --P--> (123, 134, 145) --Q--> (123, 135, 345)
//! (124, 234, 145) --R--> (125, 234, 245) --S--> (125, 235, 345) --T--> (123, 135, 345)
//! ```

use std::fmt;

/// Triangle `ijk` with `1 <= i < j < k <= 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle([u8; 3]);

impl Triangle {
    pub fn new(i: u8, j: u8, k: u8) -> Option<Self> {
        (1 <= i && i < j && j < k && k <= 5).then_some(Self([i, j, k]))
    }

    /// Panicking constructor for literal tables.
    pub const fn of(i: u8, j: u8, k: u8) -> Self {
        assert!(1 <= i && i < j && j < k && k <= 5);
        Self([i, j, k])
    }

    pub fn vertices(self) -> [u8; 3] {
        self.0
    }

    pub fn vertex_sum(self) -> u8 {
        self.0.iter().sum()
    }

    /// All ten triangles, sorted by vertex sum then lexicographically.
    pub fn all() -> Vec<Triangle> {
        let mut out = Vec::with_capacity(10);
        for i in 1..=5 {
            for j in i + 1..=5 {
                for k in j + 1..=5 {
                    out.push(Triangle([i, j, k]));
                }
            }
        }
        out.sort_by_key(|t| (t.vertex_sum(), t.0));
        out
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

/// One of the five flips of the pentagon; each is a tetrahedron of the
/// 2-3 move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flip {
    P,
    Q,
    R,
    S,
    T,
}

const T123: Triangle = Triangle::of(1, 2, 3);
const T124: Triangle = Triangle::of(1, 2, 4);
const T125: Triangle = Triangle::of(1, 2, 5);
const T134: Triangle = Triangle::of(1, 3, 4);
const T135: Triangle = Triangle::of(1, 3, 5);
const T145: Triangle = Triangle::of(1, 4, 5);
const T234: Triangle = Triangle::of(2, 3, 4);
const T235: Triangle = Triangle::of(2, 3, 5);
const T245: Triangle = Triangle::of(2, 4, 5);
const T345: Triangle = Triangle::of(3, 4, 5);

/// Initial triangulation shared by both sides of the move.
pub const INITIAL: [Triangle; 3] = [T124, T234, T145];
/// Final triangulation shared by both sides of the move.
pub const FINAL: [Triangle; 3] = [T123, T135, T345];

impl Flip {
    pub const ALL: [Flip; 5] = [Flip::P, Flip::Q, Flip::R, Flip::S, Flip::T];

    /// Vertices of the tetrahedron, which are also the quadrilateral the
    /// flip acts in.
    pub fn tetrahedron(self) -> [u8; 4] {
        match self {
            Flip::P => [1, 2, 3, 4],
            Flip::Q => [1, 3, 4, 5],
            Flip::R => [1, 2, 4, 5],
            Flip::S => [2, 3, 4, 5],
            Flip::T => [1, 2, 3, 5],
        }
    }

    /// Positions (0-based, out of three) of the stack the flip changes.
    pub fn slots(self) -> (usize, usize) {
        match self {
            Flip::P | Flip::T => (0, 1),
            Flip::Q | Flip::S => (1, 2),
            Flip::R => (0, 2),
        }
    }

    /// Triangles replaced, in slot order.
    pub fn inputs(self) -> [Triangle; 2] {
        match self {
            Flip::P => [T124, T234],
            Flip::Q => [T134, T145],
            Flip::R => [T124, T145],
            Flip::S => [T234, T245],
            Flip::T => [T125, T235],
        }
    }

    /// Triangles produced, in slot order.
    pub fn outputs(self) -> [Triangle; 2] {
        match self {
            Flip::P => [T123, T134],
            Flip::Q => [T135, T345],
            Flip::R => [T125, T245],
            Flip::S => [T235, T345],
            Flip::T => [T123, T135],
        }
    }

    /// Full three-triangle stack before the flip.
    pub fn stack_before(self) -> [Triangle; 3] {
        match self {
            Flip::P | Flip::R => INITIAL,
            Flip::Q => [T123, T134, T145],
            Flip::S => [T125, T234, T245],
            Flip::T => [T125, T235, T345],
        }
    }

    pub fn stack_after(self) -> [Triangle; 3] {
        let mut s = self.stack_before();
        let (a, b) = self.slots();
        let [o1, o2] = self.outputs();
        s[a] = o1;
        s[b] = o2;
        s
    }

    /// Tetrahedron label such as `"1234"`.
    pub fn label(self) -> String {
        self.tetrahedron()
            .iter()
            .map(|v| char::from(b'0' + v))
            .collect()
    }
}

impl fmt::Display for Flip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flip::P => "P",
            Flip::Q => "Q",
            Flip::R => "R",
            Flip::S => "S",
            Flip::T => "T",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stacks_chain_consistently() {
        assert_eq!(Flip::P.stack_after(), Flip::Q.stack_before());
        assert_eq!(Flip::Q.stack_after(), FINAL);
        assert_eq!(Flip::R.stack_after(), Flip::S.stack_before());
        assert_eq!(Flip::S.stack_after(), Flip::T.stack_before());
        assert_eq!(Flip::T.stack_after(), FINAL);
    }

    #[test]
    fn stacks_follow_vertex_sum_order() {
        for f in Flip::ALL {
            for s in [f.stack_before(), f.stack_after()] {
                assert!(
                    s.windows(2).all(|w| w[0].vertex_sum() < w[1].vertex_sum()),
                    "{f}"
                );
            }
        }
    }

    #[test]
    fn flip_triangles_live_in_its_tetrahedron() {
        for f in Flip::ALL {
            let tet = f.tetrahedron();
            for t in f.inputs().iter().chain(f.outputs().iter()) {
                assert!(t.vertices().iter().all(|v| tet.contains(v)), "{f} {t}");
            }
            let (a, b) = f.slots();
            let before = f.stack_before();
            assert_eq!([before[a], before[b]], f.inputs());
        }
    }

    #[test]
    fn global_order() {
        let names: Vec<String> = Triangle::all().iter().map(|t| t.to_string()).collect();
        assert_eq!(
            names,
            ["123", "124", "125", "134", "135", "234", "145", "235", "245", "345"]
        );
        assert!(Triangle::new(2, 1, 3).is_none());
        assert!(Triangle::new(1, 2, 6).is_none());
    }
}
