//! Word-sequence diff used to show how a license file drifted from the
//! canonical text.
//!
//! Myers' divide-and-conquer diff (middle snake, linear space): near-equal
//! texts, the common case here, diff in close to linear time. Runs are
//! normalized so a substitution renders as one delete run followed by one
//! insert run.

use serde::Serialize;

/// One run of a word-level diff. In `diff_against_canonical` terms:
/// `Delete` words appear in the canonical text only, `Insert` words were
/// added by the file under inspection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", content = "words", rename_all = "lowercase")]
pub enum DiffRun {
    Equal(Vec<String>),
    Delete(Vec<String>),
    Insert(Vec<String>),
}

/// Diffs two word sequences (`old` → `new`) into normalized runs.
///
/// The result is a minimal edit script: total equal-run length equals the
/// length of a longest common subsequence of the inputs.
pub fn diff_words(old: &[String], new: &[String]) -> Vec<DiffRun> {
    let mut builder = RunBuilder::default();
    diff_rec(old, new, &mut builder);
    builder.finish()
}

/// Accumulates raw segments and coalesces them into normalized runs.
#[derive(Default)]
struct RunBuilder {
    runs: Vec<DiffRun>,
    pending_delete: Vec<String>,
    pending_insert: Vec<String>,
}

impl RunBuilder {
    fn equal(&mut self, words: &[String]) {
        if words.is_empty() {
            return;
        }
        self.flush();
        if let Some(DiffRun::Equal(run)) = self.runs.last_mut() {
            run.extend_from_slice(words);
        } else {
            self.runs.push(DiffRun::Equal(words.to_vec()));
        }
    }

    fn delete(&mut self, words: &[String]) {
        self.pending_delete.extend_from_slice(words);
    }

    fn insert(&mut self, words: &[String]) {
        self.pending_insert.extend_from_slice(words);
    }

    fn flush(&mut self) {
        if !self.pending_delete.is_empty() {
            let words = std::mem::take(&mut self.pending_delete);
            self.runs.push(DiffRun::Delete(words));
        }
        if !self.pending_insert.is_empty() {
            let words = std::mem::take(&mut self.pending_insert);
            self.runs.push(DiffRun::Insert(words));
        }
    }

    fn finish(mut self) -> Vec<DiffRun> {
        self.flush();
        self.runs
    }
}

fn diff_rec(old: &[String], new: &[String], out: &mut RunBuilder) {
    // Strip the common prefix and suffix; only the middle needs the snake.
    let prefix = old.iter().zip(new).take_while(|(a, b)| a == b).count();
    let suffix = old[prefix..]
        .iter()
        .rev()
        .zip(new[prefix..].iter().rev())
        .take_while(|(a, b)| a == b)
        .count();
    out.equal(&old[..prefix]);

    let mid_old = &old[prefix..old.len() - suffix];
    let mid_new = &new[prefix..new.len() - suffix];
    match (mid_old.is_empty(), mid_new.is_empty()) {
        (true, true) => {}
        (true, false) => out.insert(mid_new),
        (false, true) => out.delete(mid_old),
        (false, false) => {
            let (x, y, u, v) = middle_snake(mid_old, mid_new);
            if (x, y) == (0, 0) && (u, v) == (mid_old.len(), mid_new.len()) {
                // Degenerate split; fall back to a plain replacement rather
                // than recurse forever. (Unreachable for distinct-endpoint
                // inputs; kept as a safety net.)
                out.delete(mid_old);
                out.insert(mid_new);
            } else {
                diff_rec(&mid_old[..x], &mid_new[..y], out);
                out.equal(&mid_old[x..u]);
                diff_rec(&mid_old[u..], &mid_new[v..], out);
            }
        }
    }

    out.equal(&old[old.len() - suffix..]);
}

/// Finds a middle snake of an optimal edit path: a (possibly empty) run of
/// matches from `(x, y)` to `(u, v)` splitting the problem in two.
fn middle_snake(old: &[String], new: &[String]) -> (usize, usize, usize, usize) {
    let n = old.len() as isize;
    let m = new.len() as isize;
    let max_d = (n + m + 1) / 2 + 1;
    let offset = max_d + 1;
    let size = (2 * max_d + 3) as usize;
    // vf[k]: furthest x reached on diagonal k going forward.
    // vb[k]: furthest reversed-x reached on reverse diagonal k.
    let mut vf = vec![0isize; size];
    let mut vb = vec![0isize; size];
    let delta = n - m;
    let odd = delta.rem_euclid(2) == 1;

    for d in 0..=max_d {
        let mut k = -d;
        while k <= d {
            let i = (k + offset) as usize;
            let mut x = if k == -d || (k != d && vf[i - 1] < vf[i + 1]) {
                vf[i + 1]
            } else {
                vf[i - 1] + 1
            };
            let mut y = x - k;
            let (x0, y0) = (x, y);
            while x < n && y < m && old[x as usize] == new[y as usize] {
                x += 1;
                y += 1;
            }
            vf[i] = x;
            if odd && (delta - k).abs() < d {
                let j = (delta - k + offset) as usize;
                if vf[i] + vb[j] >= n {
                    return (x0 as usize, y0 as usize, x as usize, y as usize);
                }
            }
            k += 2;
        }

        let mut k = -d;
        while k <= d {
            let i = (k + offset) as usize;
            let mut x = if k == -d || (k != d && vb[i - 1] < vb[i + 1]) {
                vb[i + 1]
            } else {
                vb[i - 1] + 1
            };
            let mut y = x - k;
            let (x0, y0) = (x, y);
            while x < n && y < m && old[(n - x - 1) as usize] == new[(m - y - 1) as usize] {
                x += 1;
                y += 1;
            }
            vb[i] = x;
            if !odd && (delta - k).abs() <= d {
                let j = (delta - k + offset) as usize;
                if vb[i] + vf[j] >= n {
                    // Map the reverse-coordinate snake back to forward
                    // coordinates; start and end swap in the process.
                    return (
                        (n - x) as usize,
                        (m - y) as usize,
                        (n - x0) as usize,
                        (m - y0) as usize,
                    );
                }
            }
            k += 2;
        }
    }
    unreachable!("an edit path of length at most n+m always exists")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn equal_total(runs: &[DiffRun]) -> usize {
        runs.iter()
            .map(|run| match run {
                DiffRun::Equal(w) => w.len(),
                _ => 0,
            })
            .sum()
    }

    /// Reference LCS length by dynamic programming.
    fn lcs_len(a: &[String], b: &[String]) -> usize {
        let mut row = vec![0usize; b.len() + 1];
        for item in a {
            let mut prev = 0;
            for (j, other) in b.iter().enumerate() {
                let up_left = prev;
                prev = row[j + 1];
                row[j + 1] = if item == other { up_left + 1 } else { row[j + 1].max(row[j]) };
            }
        }
        row[b.len()]
    }

    /// Applying the script must reproduce both sequences.
    fn check_reconstruction(runs: &[DiffRun], old: &[String], new: &[String]) {
        let mut from_old = Vec::new();
        let mut from_new = Vec::new();
        for run in runs {
            match run {
                DiffRun::Equal(w) => {
                    from_old.extend_from_slice(w);
                    from_new.extend_from_slice(w);
                }
                DiffRun::Delete(w) => from_old.extend_from_slice(w),
                DiffRun::Insert(w) => from_new.extend_from_slice(w),
            }
        }
        assert_eq!(from_old, old);
        assert_eq!(from_new, new);
    }

    #[test]
    fn identical_sequences_diff_to_one_equal_run() {
        let a = words("permission is hereby granted free of charge");
        let runs = diff_words(&a, &a);
        assert_eq!(runs, vec![DiffRun::Equal(a.clone())]);
    }

    #[test]
    fn empty_new_sequence_is_one_deletion_run() {
        let a = words("the whole canonical text");
        let runs = diff_words(&a, &[]);
        assert_eq!(runs, vec![DiffRun::Delete(a.clone())]);
    }

    #[test]
    fn substitution_renders_as_delete_then_insert() {
        let old = words("copyright 2004 original author");
        let new = words("copyright 2004 somebody else author");
        let runs = diff_words(&old, &new);
        assert_eq!(
            runs,
            vec![
                DiffRun::Equal(words("copyright 2004")),
                DiffRun::Delete(words("original")),
                DiffRun::Insert(words("somebody else")),
                DiffRun::Equal(words("author")),
            ]
        );
    }

    #[test]
    fn scripts_are_valid_and_lcs_optimal_on_assorted_cases() {
        let cases = [
            ("", ""),
            ("a", ""),
            ("", "b"),
            ("a", "b"),
            ("a b c a b b a", "c b a b a c"),
            ("x y z", "x z"),
            ("one two three four", "zero one three four five"),
            ("a a a a", "a a"),
            ("q w e r t y", "y t r e w q"),
        ];
        for (a, b) in cases {
            let old = words(a);
            let new = words(b);
            let runs = diff_words(&old, &new);
            check_reconstruction(&runs, &old, &new);
            assert_eq!(
                equal_total(&runs),
                lcs_len(&old, &new),
                "suboptimal script for {a:?} vs {b:?}"
            );
        }
    }

    #[test]
    fn no_adjacent_runs_of_the_same_kind() {
        let old = words("a b c d e f g h");
        let new = words("a x c d y f h g");
        let runs = diff_words(&old, &new);
        for pair in runs.windows(2) {
            assert!(
                std::mem::discriminant(&pair[0]) != std::mem::discriminant(&pair[1]),
                "adjacent runs of the same kind: {runs:?}"
            );
        }
    }
}
