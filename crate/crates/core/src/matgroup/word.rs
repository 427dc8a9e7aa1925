//! Freely reduced words over the four letters a, A, b, B (capital = inverse).

use super::MatGroupError;
use rand::Rng;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

pub const LETTERS: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

impl Letter {
    pub fn inverse(self) -> Self {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Letter::A => 0,
            Letter::AInv => 1,
            Letter::B => 2,
            Letter::BInv => 3,
        }
    }

    pub fn from_index(i: usize) -> Self {
        LETTERS[i]
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Result<Self, MatGroupError> {
        match c {
            'a' => Ok(Letter::A),
            'A' => Ok(Letter::AInv),
            'b' => Ok(Letter::B),
            'B' => Ok(Letter::BInv),
            other => Err(MatGroupError::UnknownLetter(other)),
        }
    }
}

/// A freely reduced word: no letter is followed by its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self, MatGroupError> {
        for (i, pair) in letters.windows(2).enumerate() {
            if pair[1] == pair[0].inverse() {
                return Err(MatGroupError::NotReduced(i + 1));
            }
        }
        Ok(Self { letters })
    }

    pub fn empty() -> Self {
        Self { letters: Vec::new() }
    }

    pub fn parse(s: &str) -> Result<Self, MatGroupError> {
        let letters = s
            .chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Uniform sample from the 4·3^{len-1} freely reduced words of a length.
    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        for _ in 0..len {
            let next = match letters.last().copied() {
                None => LETTERS[rng.gen_range(0..4)],
                Some(prev) => {
                    let banned = prev.inverse();
                    let mut pick = rng.gen_range(0..3);
                    let mut chosen = None;
                    for l in LETTERS {
                        if l == banned {
                            continue;
                        }
                        if pick == 0 {
                            chosen = Some(l);
                            break;
                        }
                        pick -= 1;
                    }
                    chosen.unwrap()
                }
            };
            letters.push(next);
        }
        Self { letters }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "(empty)");
        }
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_unreduced() {
        assert!(matches!(
            ReducedWord::parse("aA"),
            Err(MatGroupError::NotReduced(1))
        ));
        assert!(ReducedWord::parse("abA").is_ok());
        assert!(matches!(
            ReducedWord::parse("xyz"),
            Err(MatGroupError::UnknownLetter('x'))
        ));
    }

    #[test]
    fn random_words_are_reduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for len in 1..20 {
            let w = ReducedWord::random(len, &mut rng);
            assert_eq!(w.len(), len);
            assert!(ReducedWord::new(w.letters().to_vec()).is_ok());
        }
    }

    #[test]
    fn roundtrip_display() {
        let w = ReducedWord::parse("abAB").unwrap();
        assert_eq!(w.to_string(), "abAB");
    }
}
