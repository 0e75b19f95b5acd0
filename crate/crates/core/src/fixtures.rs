//! Small reference instances with known answers.

/// Unique stable matching `{a,b} {c,d} {f,g}`, `e` single.
pub const SRI7: &str = "\
a: b e d f g
b: c f a g e
c: d g b e f a
d: a c e f g
e: f a b c d
f: g b e c d a
g: c f d a b
";

/// Complete strict lists with no stable matching.
pub const SRI4: &str = "\
a: b c d
b: c a d
c: a b d
d: a b c
";

/// Two stable matchings: `{a,c} {b,h} {d,e} {f,g}` (egalitarian) and
/// `{a,c} {b,h} {d,g} {e,f}` (rank-maximal).
pub const SRI8: &str = "\
a: c e f g d h
b: d f h c g
c: a b f h e d
d: h g e a b c
e: g c b d a f
f: e a g c h b
g: f h d b c
h: b d a e f
";
