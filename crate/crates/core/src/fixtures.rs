//! Shared inputs for unit tests.

/// The running example tree: a Black root with children Black, White (with
/// children White, Black), Black, White (with child Black), Black.
pub const SAMPLE: &str = "(Black (Black) (White (White) (Black)) (Black) (White (Black)) (Black))";

/// Selects the root iff exactly two of its children are White.
pub const TWO_WHITE: &str = "\
Ans(x) <- Root(x), Fc(x,y), White2(y).
White2(x) <- Label_Black(x), Ns(x,y), White2(y).
White2(x) <- Label_White(x), Ns(x,y), White1(y).
White1(x) <- Label_Black(x), Ns(x,y), White1(y).
White1(x) <- Label_White(x), Ns(x,y), White0(y).
White0(x) <- Label_Black(x), Ns(x,y), White0(y).
White1(x) <- Label_White(x), Ls(x).
White0(x) <- Label_Black(x), Ls(x).
";

/// The same query in first-order logic over unordered trees.
pub const MSO_CHILD: &str = "~(E u. Child(u,x)) & E y. E z. (y != z & Child(x,y) & Child(x,z) \
    & Label_White(y) & Label_White(z) & A v. (Child(x,v) -> (v = y | v = z | ~Label_White(v))))";
