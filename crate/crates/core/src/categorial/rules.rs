use std::fmt;

use super::types::CatType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    /// Application.
    R1,
    /// Composition.
    R2,
    /// Associativity.
    R3,
    /// Lifting.
    R4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A rule together with its side, printed `R1L`, `R2R` and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub rule: RuleKind,
    pub side: Side,
}

impl Step {
    pub const R1L: Step = Step::new(RuleKind::R1, Side::Left);
    pub const R1R: Step = Step::new(RuleKind::R1, Side::Right);
    pub const R2L: Step = Step::new(RuleKind::R2, Side::Left);
    pub const R2R: Step = Step::new(RuleKind::R2, Side::Right);
    pub const R3L: Step = Step::new(RuleKind::R3, Side::Left);
    pub const R3R: Step = Step::new(RuleKind::R3, Side::Right);
    pub const R4L: Step = Step::new(RuleKind::R4, Side::Left);
    pub const R4R: Step = Step::new(RuleKind::R4, Side::Right);

    pub const BINARY: [Step; 4] = [Step::R1L, Step::R1R, Step::R2L, Step::R2R];

    pub const fn new(rule: RuleKind, side: Side) -> Step {
        Step { rule, side }
    }

    pub fn is_unary(self) -> bool {
        matches!(self.rule, RuleKind::R3 | RuleKind::R4)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Left => 'L',
            Side::Right => 'R',
        };
        write!(f, "{:?}{side}", self.rule)
    }
}

/// Applies one rule schema. Binary rules take the two adjacent types in
/// sentence order; unary rules take one. Lifting needs the result type `B`
/// in `lift`. Returns `None` when the inputs do not have the required shape.
///
/// - R1R: `B/A, A => B`; R1L: `A, A\B => B`
/// - R2R: `A/B, B/C => A/C`; R2L: `C\B, B\A => C\A`
/// - R3R: `(C\A)/B => C\(A/B)`; R3L: the converse
/// - R4R: `A => B/(A\B)`; R4L: `A => (B/A)\B`
pub fn apply_rule(step: Step, inputs: &[&CatType], lift: Option<&CatType>) -> Option<CatType> {
    use CatType::{Left, Right};
    match (step.rule, step.side, inputs) {
        (RuleKind::R1, Side::Right, [Right(b, a), x]) if **a == **x => Some((**b).clone()),
        (RuleKind::R1, Side::Left, [x, Left(a, b)]) if **a == **x => Some((**b).clone()),
        (RuleKind::R2, Side::Right, [Right(a, b), Right(b2, c)]) if b == b2 => {
            Some(CatType::right((**a).clone(), (**c).clone()))
        }
        (RuleKind::R2, Side::Left, [Left(c, b), Left(b2, a)]) if b == b2 => {
            Some(CatType::left((**c).clone(), (**a).clone()))
        }
        (RuleKind::R3, Side::Right, [Right(ca, b)]) => match &**ca {
            Left(c, a) => Some(CatType::left(
                (**c).clone(),
                CatType::right((**a).clone(), (**b).clone()),
            )),
            _ => None,
        },
        (RuleKind::R3, Side::Left, [Left(c, ab)]) => match &**ab {
            Right(a, b) => Some(CatType::right(
                CatType::left((**c).clone(), (**a).clone()),
                (**b).clone(),
            )),
            _ => None,
        },
        (RuleKind::R4, Side::Right, [a]) => {
            let b = lift?;
            Some(CatType::right(
                b.clone(),
                CatType::left((*a).clone(), b.clone()),
            ))
        }
        (RuleKind::R4, Side::Left, [a]) => {
            let b = lift?;
            Some(CatType::left(
                CatType::right(b.clone(), (*a).clone()),
                b.clone(),
            ))
        }
        _ => None,
    }
}
