//! Braid words and the word-level moves used by the invariant checks:
//! conjugation, Markov stabilization and annular composition.
//!
//! Letters are signed Artin generators: `i` is the positive half-twist of
//! strands `(i, i+1)` (1-based) and `-i` its inverse. No free reduction is
//! ever performed; every move is an explicit operation.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("malformed braid text: {0}")]
    Parse(String),
    #[error("braid must have at least one strand")]
    NoStrands,
    #[error("letter {letter} at index {index} is out of range for {strands} strands")]
    LetterOutOfRange {
        index: usize,
        letter: i32,
        strands: usize,
    },
    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),
}

/// Sign of a Markov stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        for (index, &letter) in letters.iter().enumerate() {
            if letter == 0 || letter.unsigned_abs() as usize >= strands {
                return Err(BraidError::LetterOutOfRange {
                    index,
                    letter,
                    strands,
                });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// The identity braid on `strands` strands.
    pub fn trivial(strands: usize) -> Result<Self, BraidError> {
        Self::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    /// Number of crossings of the closure diagram.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Exponent sum of the word.
    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|&l| l.signum() as i64).sum()
    }

    pub fn positive_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l > 0).count()
    }

    pub fn negative_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l < 0).count()
    }

    /// Self-linking number `-n + w` of the transverse closure.
    pub fn self_linking(&self) -> i64 {
        self.writhe() - self.strands as i64
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// The word `g · self · g⁻¹`, written out letter by letter.
    pub fn conjugate(&self, g: &BraidWord) -> Result<BraidWord, BraidError> {
        if g.strands != self.strands {
            return Err(BraidError::StrandMismatch(self.strands, g.strands));
        }
        let mut letters = Vec::with_capacity(self.len() + 2 * g.len());
        letters.extend_from_slice(&g.letters);
        letters.extend_from_slice(&self.letters);
        letters.extend(g.letters.iter().rev().map(|&l| -l));
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    /// Word product `self · other`.
    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if other.strands != self.strands {
            return Err(BraidError::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    /// Markov stabilization: adds a strand and appends `±σ_n`.
    pub fn stabilize(&self, sign: Sign) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.push(sign.as_i32() * self.strands as i32);
        BraidWord {
            strands: self.strands + 1,
            letters,
        }
    }

    /// Horizontal juxtaposition; the closure of the result is the annular
    /// composition of both closures with `inner` shifted past the strands of
    /// `self`.
    pub fn annular_compose(&self, inner: &BraidWord) -> BraidWord {
        let shift = self.strands as i32;
        let mut letters = self.letters.clone();
        letters.extend(inner.letters.iter().map(|&l| l.signum() * (l.abs() + shift)));
        BraidWord {
            strands: self.strands + inner.strands,
            letters,
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.strands)?;
        for l in &self.letters {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = BraidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_braid(s)
    }
}

/// Parses `<n> ":" <l1> <l2> ...` with whitespace- or comma-separated letters.
pub fn parse_braid(text: &str) -> Result<BraidWord, BraidError> {
    let (head, tail) = text
        .split_once(':')
        .ok_or_else(|| BraidError::Parse(format!("missing ':' in {text:?}")))?;
    let strands: usize = head
        .trim()
        .parse()
        .map_err(|_| BraidError::Parse(format!("bad strand count {:?}", head.trim())))?;
    let letters = tail
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<i32>()
                .map_err(|_| BraidError::Parse(format!("bad letter token {tok:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    BraidWord::new(strands, letters)
}
