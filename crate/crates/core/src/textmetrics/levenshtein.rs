//! Levenshtein distance over Unicode scalar values.
//!
//! [`levenshtein_reference`] tabulates the recurrence with two rolling rows.
//! [`levenshtein`] and [`PatternMasks`] use Hyyrö's block-based bit-parallel
//! formulation of Myers' algorithm and agree exactly with the reference.

use std::collections::HashMap;

/// Two-row tabulation of the edit-distance recurrence.
pub fn levenshtein_reference(s: &[char], t: &[char]) -> usize {
    if s.is_empty() {
        return t.len();
    }
    let mut prev: Vec<usize> = (0..=t.len()).collect();
    let mut curr = vec![0; t.len() + 1];
    for (i, sc) in s.iter().enumerate() {
        curr[0] = i + 1;
        for (j, tc) in t.iter().enumerate() {
            let sub = prev[j] + usize::from(sc != tc);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[t.len()]
}

/// Per-character match bit vectors of a pattern, reusable across texts.
#[derive(Debug, Clone)]
pub struct PatternMasks {
    len: usize,
    words: usize,
    ascii: [u32; 128],
    other: HashMap<char, u32>,
    // `words` u64 blocks per distinct character, in first-seen order
    masks: Vec<u64>,
}

const ABSENT: u32 = u32::MAX;

impl PatternMasks {
    pub fn new(pattern: &[char]) -> Self {
        let words = pattern.len().div_ceil(64);
        let mut pm = PatternMasks {
            len: pattern.len(),
            words,
            ascii: [ABSENT; 128],
            other: HashMap::new(),
            masks: Vec::new(),
        };
        for (i, &c) in pattern.iter().enumerate() {
            let slot = match pm.slot(c) {
                Some(s) => s,
                None => {
                    let s = (pm.masks.len() / words.max(1)) as u32;
                    pm.masks.extend(std::iter::repeat_n(0, words));
                    if (c as u32) < 128 {
                        pm.ascii[c as usize] = s;
                    } else {
                        pm.other.insert(c, s);
                    }
                    s
                }
            };
            pm.masks[slot as usize * words + i / 64] |= 1u64 << (i % 64);
        }
        pm
    }

    fn slot(&self, c: char) -> Option<u32> {
        let s = if (c as u32) < 128 {
            self.ascii[c as usize]
        } else {
            self.other.get(&c).copied().unwrap_or(ABSENT)
        };
        (s != ABSENT).then_some(s)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Edit distance between the pattern and `text`.
    pub fn distance(&self, text: &[char]) -> usize {
        if self.len == 0 {
            return text.len();
        }
        if text.is_empty() {
            return self.len;
        }
        let words = self.words;
        let last = 1u64 << ((self.len - 1) % 64);
        let zeros = vec![0u64; words];
        let mut vp = vec![!0u64; words];
        let mut vn = vec![0u64; words];
        let mut score = self.len;

        for &c in text {
            let eq = match self.slot(c) {
                Some(s) => &self.masks[s as usize * words..(s as usize + 1) * words],
                None => &zeros[..],
            };
            // horizontal deltas entering the top row are +1
            let mut hp_carry = 1u64;
            let mut hn_carry = 0u64;
            for w in 0..words {
                let x = eq[w] | hn_carry;
                let (v_p, v_n) = (vp[w], vn[w]);
                let d0 = ((x & v_p).wrapping_add(v_p) ^ v_p) | x | v_n;
                let mut hp = v_n | !(d0 | v_p);
                let mut hn = d0 & v_p;
                let (hp_in, hn_in) = (hp_carry, hn_carry);
                if w + 1 < words {
                    hp_carry = hp >> 63;
                    hn_carry = hn >> 63;
                } else {
                    hp_carry = u64::from(hp & last != 0);
                    hn_carry = u64::from(hn & last != 0);
                }
                hp = (hp << 1) | hp_in;
                hn = (hn << 1) | hn_in;
                vp[w] = hn | !(d0 | hp);
                vn[w] = hp & d0;
            }
            score = score + hp_carry as usize - hn_carry as usize;
        }
        score
    }
}

/// Edit distance between two strings, counted in Unicode scalar values.
pub fn levenshtein(s: &str, t: &str) -> usize {
    let a: Vec<char> = s.chars().collect();
    let b: Vec<char> = t.chars().collect();
    levenshtein_chars(&a, &b)
}

pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    // a shared prefix or suffix never changes the distance
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (pattern, text) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    PatternMasks::new(pattern).distance(text)
}

/// Edit distance divided by the longer length; two empty strings are at
/// distance 0.
pub fn normalized_levenshtein(s: &str, t: &str) -> f64 {
    let a: Vec<char> = s.chars().collect();
    let b: Vec<char> = t.chars().collect();
    normalize(levenshtein_chars(&a, &b), a.len(), b.len())
}

pub(crate) fn normalize(distance: usize, len_a: usize, len_b: usize) -> f64 {
    let longest = len_a.max(len_b);
    if longest == 0 {
        0.0
    } else {
        distance as f64 / longest as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn examples() {
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(normalized_levenshtein("abcdef", "ghijklmnopqrst"), 1.0);
        assert_eq!(normalized_levenshtein("aaaa", "aaaa"), 0.0);
        assert_eq!(normalized_levenshtein("", ""), 0.0);
    }

    #[test]
    fn unicode_scalars_not_bytes() {
        // one substitution, although the byte lengths differ
        assert_eq!(levenshtein("qualità", "qualita"), 1);
        assert_eq!(levenshtein("città", "cittè"), 1);
        assert_eq!(normalized_levenshtein("è", "e"), 1.0);
    }

    #[test]
    fn multi_block_patterns() {
        let a: String = "abcdefghij".repeat(30);
        let mut b = a.clone();
        b.insert(150, 'x');
        b.replace_range(10..11, "y");
        assert_eq!(levenshtein(&a, &b), 2);
        let pm = PatternMasks::new(&chars(&a));
        assert_eq!(pm.distance(&chars(&b)), levenshtein_reference(&chars(&a), &chars(&b)));
        assert_eq!(pm.distance(&[]), 300);
        assert_eq!(PatternMasks::new(&[]).distance(&chars("abc")), 3);
    }

    fn arb_text(max: usize) -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'à', '字']), 0..max)
            .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn block_algorithm_matches_reference(a in arb_text(200), b in arb_text(200)) {
            let (ca, cb) = (chars(&a), chars(&b));
            let expected = levenshtein_reference(&ca, &cb);
            prop_assert_eq!(levenshtein(&a, &b), expected);
            // same masks, no prefix/suffix trimming, pattern may be longer
            prop_assert_eq!(PatternMasks::new(&ca).distance(&cb), expected);
        }

        #[test]
        fn length_bounds(a in arb_text(80), b in arb_text(80)) {
            let (la, lb) = (a.chars().count(), b.chars().count());
            let d = levenshtein(&a, &b);
            prop_assert!(d >= la.abs_diff(lb));
            prop_assert!(d <= la.max(lb));
            prop_assert_eq!(d == 0, a == b);
            let n = normalized_levenshtein(&a, &b);
            prop_assert!((0.0..=1.0).contains(&n));
        }
    }
}
