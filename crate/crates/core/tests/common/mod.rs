//! Independent oracles and fixtures shared by the integration tests and the
//! acceptance suite. Nothing here calls into the library's counting or
//! scoring code.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Segments = Vec<Vec<String>>;

/// Random corpus of at most `max_tokens` tokens over `types` word types.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_tokens: usize, types: usize) -> Segments {
    let budget = rng.gen_range(0..=max_tokens);
    let mut segs = Vec::new();
    let mut used = 0;
    while used < budget {
        let len = rng.gen_range(1..=12).min(budget - used);
        let seg = (0..len).map(|_| format!("w{}", rng.gen_range(0..types))).collect();
        segs.push(seg);
        used += len;
    }
    segs
}

/// Every window of `n` tokens inside a segment, in corpus order.
pub fn windows(segs: &Segments, n: usize) -> Vec<&[String]> {
    segs.iter().flat_map(|s| s.windows(n)).collect()
}

/// Joint counts by brute-force enumeration.
pub fn naive_joints(segs: &Segments, n: usize) -> HashMap<Vec<String>, u64> {
    let mut out = HashMap::new();
    for w in windows(segs, n) {
        *out.entry(w.to_vec()).or_insert(0) += 1;
    }
    out
}

/// Projection of an n-gram onto the positions in `mask` (bit i = position i).
pub fn project(ngram: &[String], mask: usize) -> Vec<Option<String>> {
    ngram
        .iter()
        .enumerate()
        .map(|(i, t)| (mask >> i & 1 == 1).then(|| t.clone()))
        .collect()
}

/// For one mask, how many windows in `pool` share each projection.
pub fn naive_marginals(pool: &HashMap<Vec<String>, u64>, mask: usize) -> HashMap<Vec<Option<String>>, u64> {
    let mut out = HashMap::new();
    for (g, c) in pool {
        *out.entry(project(g, mask)).or_insert(0) += c;
    }
    out
}

/// The four cells of a bigram table.
#[derive(Debug, Clone, Copy)]
pub struct Table2 {
    pub n11: u64,
    pub n1p: u64,
    pub np1: u64,
    pub npp: u64,
}

impl Table2 {
    pub fn cells(&self) -> [u64; 4] {
        let n12 = self.n1p - self.n11;
        let n21 = self.np1 - self.n11;
        [self.n11, n12, n21, self.npp - self.n1p - n21]
    }

    fn rows_cols(&self) -> [(u64, u64); 4] {
        let (n2p, np2) = (self.npp - self.n1p, self.npp - self.np1);
        [(self.n1p, self.np1), (self.n1p, np2), (n2p, self.np1), (n2p, np2)]
    }
}

/// Consistent random table with `npp` drawn log-uniformly from [2, max_npp].
pub fn random_table(rng: &mut ChaCha8Rng, max_npp: u64) -> Table2 {
    let npp = (2f64.ln() + rng.gen::<f64>() * ((max_npp as f64).ln() - 2f64.ln())).exp() as u64;
    let npp = npp.clamp(2, max_npp);
    let n1p = rng.gen_range(1..npp);
    let np1 = rng.gen_range(1..npp);
    let lo = (n1p + np1).saturating_sub(npp);
    let hi = n1p.min(np1);
    // Bias toward positive association half of the time, as real candidates are.
    let n11 = if rng.gen_bool(0.5) {
        hi - (rng.gen::<f64>().powi(3) * (hi - lo) as f64) as u64
    } else {
        rng.gen_range(lo..=hi)
    };
    Table2 { n11, n1p, np1, npp }
}

fn rational(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Straight-from-the-formula bigram scores. Rational measures are evaluated
/// exactly; the logarithmic ones in plain floating point. `None` where the
/// formula is undefined.
pub fn oracle_score(name: &str, t: Table2) -> Option<f64> {
    let cells = t.cells();
    let npp = t.npp as f64;
    let expected: Vec<f64> = t.rows_cols().iter().map(|&(r, c)| r as f64 * c as f64 / npp).collect();
    let m11 = expected[0];
    let n11 = t.n11 as f64;
    let g_sum = || -> f64 {
        cells
            .iter()
            .zip(&expected)
            .filter(|(&o, _)| o > 0)
            .map(|(&o, &e)| o as f64 * (o as f64 / e).ln())
            .sum()
    };
    let exact_x2 = |scale: u64| -> Option<f64> {
        let rc = t.rows_cols();
        if rc.iter().any(|&(r, c)| r == 0 || c == 0) {
            return None;
        }
        let mut s = BigRational::zero();
        for (&o, &(r, c)) in cells.iter().zip(&rc) {
            let e = rational(r) * rational(c) / rational(t.npp);
            let d = rational(o) - e.clone();
            s += d.clone() * d / e;
        }
        (s * rational(scale) / rational(t.npp)).to_f64()
    };
    Some(match name {
        "dice" => (BigRational::new((2 * t.n11).into(), (t.n1p + t.np1).into())).to_f64()?,
        "jaccard" => (BigRational::new(t.n11.into(), (t.n1p + t.np1 - t.n11).into())).to_f64()?,
        "ll" => 2.0 * g_sum(),
        "mi" => g_sum() / npp,
        "pmi" if t.n11 > 0 => (n11 / m11).ln(),
        "ps" if t.n11 > 0 => n11 * ((n11 / m11).ln() - 1.0),
        "tscore" if t.n11 > 0 => (n11 - m11) / n11.sqrt(),
        "x2" => exact_x2(t.npp)?,
        "phi" => exact_x2(1)?,
        _ => return None,
    })
}

/// Binomial coefficients C(n, 0..=n).
fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Fisher tails by exact enumeration of the hypergeometric pmf.
#[derive(Debug, Clone, Copy)]
pub struct ExactFisher {
    pub left: f64,
    pub right: f64,
    pub two_tailed: f64,
    pub point: f64,
}

/// Exact Fisher probabilities. The two-tailed sum includes every outcome
/// whose probability is at most `p(n11)·(1 + tie)`.
pub fn exact_fisher(t: Table2, tie: f64) -> ExactFisher {
    let rows_a = binomial_row(t.n1p);
    let rows_b = binomial_row(t.npp - t.n1p);
    let lo = (t.n1p + t.np1).saturating_sub(t.npp);
    let hi = t.n1p.min(t.np1);
    let weights: Vec<(u64, BigInt)> = (lo..=hi)
        .map(|k| (k, rows_a[k as usize].clone() * rows_b[(t.np1 - k) as usize].clone()))
        .collect();
    let total: BigInt = weights.iter().map(|(_, w)| w.clone()).sum();
    let observed = weights
        .iter()
        .find(|(k, _)| *k == t.n11)
        .expect("n11 in support")
        .1
        .clone();
    // p(k) <= p(n11)·(1 + tie), compared with a 10^-15-grid rational bound.
    let scale = 1_000_000_000_000_000i64;
    let bound = BigRational::new(
        observed.clone() * BigInt::from(scale + (tie * scale as f64).round() as i64),
        BigInt::from(scale),
    );
    let sum = |pred: &dyn Fn(&(u64, BigInt)) -> bool| -> f64 {
        let s: BigInt = weights.iter().filter(|w| pred(w)).map(|(_, w)| w.clone()).sum();
        BigRational::new(s, total.clone()).to_f64().unwrap()
    };
    ExactFisher {
        left: sum(&|(k, _)| *k <= t.n11),
        right: sum(&|(k, _)| *k >= t.n11),
        two_tailed: sum(&|(_, w)| BigRational::from_integer(w.clone()) <= bound),
        point: BigRational::new(observed, total.clone()).to_f64().unwrap(),
    }
}

/// `|a - b| <= tol · max(|a|, |b|)`, treating two values below 1e-290 as equal.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b || (a.abs() < 1e-290 && b.abs() < 1e-290) {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Lines of a score file with decreasing scores, one per n-gram.
pub fn score_file(measure: &str, ngrams: &[&str]) -> String {
    let n = ngrams[0].split_whitespace().count();
    let mut out = format!("# measure={measure} n={n}\n");
    for (i, g) in ngrams.iter().enumerate() {
        let joined = g.split_whitespace().collect::<Vec<_>>().join("<>");
        out.push_str(&format!("{} {} {:.6} {}\n", i + 1, joined, 100.0 - i as f64, 1000 - i));
    }
    out
}

/// Log-likelihood trigram list of the irrelevant-ranking example.
pub const LL_TRIGRAMS: [&str; 20] = [
    "ya da bu",
    "ya da başka",
    "ya da böyle",
    "ya da olumsuz",
    "ya da benim",
    "ya da kişisel",
    "ya da ne",
    "ya da daha",
    "ya da diğer",
    "ya da onun",
    "ya da bana",
    "ya da birkaç",
    "ya da en",
    "ya da kendi",
    "ya da yeni",
    "ya da dolaylı",
    "ya da her",
    "ya da çok",
    "ya da yanlış",
    "ya da özel",
];

/// T-score bigram top-20.
pub const TSCORE_BIGRAMS: [&str; 20] = [
    "ya da",
    "hem de",
    "bir şey",
    "ne kadar",
    "böyle bir",
    "söz konusu",
    "büyük bir",
    "bu nedenle",
    "başka bir",
    "ben de",
    "daha çok",
    "önemli bir",
    "aynı zamanda",
    "ile ilgili",
    "daha fazla",
    "o zaman",
    "yeni bir",
    "olduğu gibi",
    "olmak üzere",
    "herhangi bir",
];

/// Poisson-Stirling trigram top-20.
pub const PS_TRIGRAMS: [&str; 20] = [
    "ne var ki",
    "ne yazık ki",
    "her ne kadar",
    "bir kez daha",
    "ne olursa olsun",
    "bir süre sonra",
    "her şeyden önce",
    "başka bir şey",
    "bir an önce",
    "başta olmak üzere",
    "kısa bir süre",
    "bir yandan da",
    "radyo ve televizyon",
    "ses kalitesi okuma",
    "ile ilgili olarak",
    "buna bağlı olarak",
    "dahil olmak üzere",
    "her geçen gün",
    "ama yine de",
    "daha önce de",
];

/// The fifty reduplications ranked by the overlap measures.
pub const REDUPLICATIONS: [&str; 50] = [
    "teker teker",
    "irili ufaklı",
    "peş peşe",
    "kayıtsız şartsız",
    "uçsuz bucaksız",
    "apar topar",
    "ışıl ışıl",
    "cıvıl cıvıl",
    "koşa koşa",
    "seve seve",
    "burun buruna",
    "tır tır",
    "doya doya",
    "gürül gürül",
    "cık cık",
    "gizliden gizliye",
    "boşu boşuna",
    "omuz omuza",
    "hüngür hüngür",
    "topu topu",
    "vah vah",
    "içli dışlı",
    "sağda solda",
    "allak bullak",
    "harıl harıl",
    "kuşaktan kuşağa",
    "kesik kesik",
    "körü körüne",
    "diri diri",
    "mışıl mışıl",
    "enine boyuna",
    "haşır neşir",
    "didik didik",
    "kıpır kıpır",
    "inceden inceye",
    "canla başla",
    "kıs kıs",
    "tıkır tıkır",
    "aşağıdan yukarıya",
    "bitmez tükenmez",
    "vura vura",
    "abuk sabuk",
    "iner inmez",
    "dalgın dalgın",
    "derme çatma",
    "kıran kırana",
    "cayır cayır",
    "döne döne",
    "oluk oluk",
    "havadan sudan",
];

/// Original text of the preprocessing example; the sentence wrapped across
/// two lines in print is one line here.
pub const PREP_INPUT: &str = "Ekoloji\n\
YAPRAK DÖKÜNTÜLERİNDE FUNGAL SUKSESYON\n\
Bu makalede, çam yaprakları ve diğer ağaç yapraklarının çürümeleleri anlatılmıştır.\n";

pub const PREP_EXPECTED: &str = "ekoloji\n\
yaprak döküntülerinde fungal suksesyon\n\
bu makalede\n\
çam yaprakları ve diğer ağaç yapraklarının çürümeleleri anlatılmıştır\n";

/// Four-grams planted in the synthetic corpus that begin with a stop word.
pub const PLANTED_STOP_FOURGRAMS: [&str; 4] = [
    "ve bir süre sonra",
    "da bir süre sonra",
    "ve bir o kadar",
    "de bir süre sonra",
];

/// Planted phrases with their number of occurrences.
const PLANTED: [(&str, usize); 14] = [
    ("ya da", 1200),
    ("hem de", 300),
    ("söz konusu", 250),
    ("bir şey", 250),
    ("ne kadar", 220),
    ("aynı zamanda", 150),
    ("kısa bir süre sonra", 60),
    ("ve bir süre sonra", 40),
    ("da bir süre sonra", 30),
    ("ve bir o kadar", 25),
    ("de bir süre sonra", 20),
    ("teker teker", 15),
    ("ışıl ışıl", 12),
    ("ne var ki", 80),
];

fn filler_word(rng: &mut ChaCha8Rng, vocab: &[String], cdf: &[f64]) -> String {
    let u: f64 = rng.gen();
    let i = cdf.partition_point(|&c| c < u).min(vocab.len() - 1);
    vocab[i].clone()
}

/// Seeded synthetic raw text of roughly `tokens` tokens: Zipf-distributed
/// filler words, frequent stand-alone `ya`, `da`, `de`, `ve` and `bir`, and the
/// planted phrases above. Segments end with commas or full stops.
pub fn synthetic_text(rng: &mut ChaCha8Rng, tokens: usize) -> String {
    const SYLLABLES: [&str; 16] = [
        "ka", "le", "mi", "ro", "su", "ta", "ne", "bu", "ğa", "şı", "çe", "lo", "de", "rü", "ya", "kı",
    ];
    let vocab: Vec<String> = (0..3000)
        .map(|i| {
            let mut w = String::new();
            let mut x = i + 16;
            while x > 0 {
                w.push_str(SYLLABLES[x % 16]);
                x /= 16;
            }
            w + "m"
        })
        .collect();
    let weights: Vec<f64> = (1..=vocab.len()).map(|r| 1.0 / r as f64).collect();
    let z: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let cdf: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w / z;
            acc
        })
        .collect();
    let function_words = ["ya", "da", "de", "ve", "bir", "bu"];

    let mut planted: Vec<&str> = PLANTED.iter().flat_map(|&(p, k)| std::iter::repeat_n(p, k)).collect();
    let planted_tokens: usize = planted.iter().map(|p| p.split(' ').count()).sum();
    let filler_tokens = tokens.saturating_sub(planted_tokens);
    // Shuffle planted phrases so they spread through the text.
    for i in (1..planted.len()).rev() {
        let j = rng.gen_range(0..=i);
        planted.swap(i, j);
    }

    let mut out = String::new();
    let mut emitted = 0;
    let mut next_plant = 0;
    let plant_every = filler_tokens / planted.len().max(1);
    let mut since_plant = 0;
    while emitted < filler_tokens || next_plant < planted.len() {
        let len = rng.gen_range(3..=14);
        let mut seg: Vec<String> = Vec::with_capacity(len + 4);
        for _ in 0..len {
            if rng.gen_bool(0.08) {
                seg.push(function_words[rng.gen_range(0..function_words.len())].to_owned());
            } else {
                seg.push(filler_word(rng, &vocab, &cdf));
            }
        }
        emitted += len;
        since_plant += len;
        if next_plant < planted.len() && (since_plant >= plant_every || emitted >= filler_tokens) {
            let at = rng.gen_range(0..=seg.len());
            let words: Vec<String> = planted[next_plant].split(' ').map(str::to_owned).collect();
            seg.splice(at..at, words);
            next_plant += 1;
            since_plant = 0;
        }
        let mut sentence = seg.join(" ");
        if rng.gen_bool(0.3) {
            // Capitalize the first letter to exercise case folding.
            let mut cs = sentence.chars();
            if let Some(c) = cs.next() {
                sentence = c.to_uppercase().chain(cs).collect();
            }
        }
        out.push_str(&sentence);
        out.push_str(if rng.gen_bool(0.4) { ", " } else { ".\n" });
    }
    out
}

/// Seeded line-per-segment corpus of exactly `tokens` tokens for counting
/// benchmarks.
pub fn synthetic_corpus_lines(rng: &mut ChaCha8Rng, tokens: usize, types: usize) -> String {
    let mut out = String::with_capacity(tokens * 7);
    let mut left = tokens;
    while left > 0 {
        let len = rng.gen_range(1..=20).min(left);
        for i in 0..len {
            if i > 0 {
                out.push(' ');
            }
            // Log-uniform ids: a heavy head and a long tail, as in text.
            let u: f64 = rng.gen();
            let id = (types as f64).powf(u) as usize - 1;
            out.push('t');
            out.push_str(&id.to_string());
        }
        out.push('\n');
        left -= len;
    }
    out
}
