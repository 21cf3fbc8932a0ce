use core::fmt;

/// One of the four side slots of a module, identified by its outward normal.
///
/// Discriminants run counterclockwise, so rotating a slot by a quarter turn is
/// `(index + 1) % 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Left = 0,
    Top = 1,
    Right = 2,
    Bottom = 3,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Left, Dir::Top, Dir::Right, Dir::Bottom];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn from_index(i: usize) -> Dir {
        match i % 4 {
            0 => Dir::Left,
            1 => Dir::Top,
            2 => Dir::Right,
            _ => Dir::Bottom,
        }
    }

    pub const fn normal(self) -> (i32, i32) {
        match self {
            Dir::Top => (0, 1),
            Dir::Left => (1, 0),
            Dir::Bottom => (0, -1),
            Dir::Right => (-1, 0),
        }
    }

    pub fn from_normal(v: (i32, i32)) -> Option<Dir> {
        Dir::ALL.into_iter().find(|d| d.normal() == v)
    }

    pub const fn opposite(self) -> Dir {
        self.rotate(2)
    }

    /// Rotates counterclockwise by `quarter_turns` quarter turns.
    pub const fn rotate(self, quarter_turns: i32) -> Dir {
        Dir::from_index((self as i32 + quarter_turns).rem_euclid(4) as usize)
    }

    pub fn perpendicular(self, other: Dir) -> bool {
        let (a, b) = (self.normal(), other.normal());
        a.0 * b.0 + a.1 * b.1 == 0
    }

    pub const fn name(self) -> &'static str {
        match self {
            Dir::Left => "Left",
            Dir::Top => "Top",
            Dir::Right => "Right",
            Dir::Bottom => "Bottom",
        }
    }

    pub fn from_name(s: &str) -> Option<Dir> {
        Dir::ALL.into_iter().find(|d| d.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normals_follow_the_lattice_convention() {
        assert_eq!(Dir::Top.normal(), (0, 1));
        assert_eq!(Dir::Left.normal(), (1, 0));
        assert_eq!(Dir::Bottom.normal(), (0, -1));
        assert_eq!(Dir::Right.normal(), (-1, 0));
    }

    #[test]
    fn opposite_and_perpendicular() {
        for d in Dir::ALL {
            assert_eq!(d.opposite().opposite(), d);
            let (a, b) = (d.normal(), d.opposite().normal());
            assert_eq!((a.0 + b.0, a.1 + b.1), (0, 0));
            for e in Dir::ALL {
                let dot = d.normal().0 * e.normal().0 + d.normal().1 * e.normal().1;
                assert_eq!(d.perpendicular(e), dot == 0);
            }
            assert_eq!(Dir::from_normal(d.normal()), Some(d));
            assert_eq!(Dir::from_name(d.name()), Some(d));
        }
    }

    #[test]
    fn rotation_is_counterclockwise() {
        // a quarter turn CCW maps +x to +y
        assert_eq!(Dir::Left.rotate(1), Dir::Top);
        assert_eq!(Dir::Top.rotate(1), Dir::Right);
        assert_eq!(Dir::Left.rotate(-1), Dir::Bottom);
    }
}
