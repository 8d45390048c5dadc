//! Crafted 100-document collection shared by the integration tests.
//!
//! Three themes each own five relevant documents, four distractors that
//! mention a single query term inside filler text, and one planted
//! document that shares no term with its topic but carries the theme
//! words, including the one whose vector sits closest to the query.
//! Filler documents draw from a pseudo-word vocabulary that never
//! overlaps the themes.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use idfawe_core::corpus::Stoplist;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 8;
pub const NUM_DOCS: usize = 100;

pub struct Theme {
    pub qid: &'static str,
    pub query: [&'static str; 2],
    pub nearest: &'static str,
    pub others: [&'static str; 4],
}

pub const THEMES: [Theme; 3] = [
    Theme {
        qid: "301",
        query: ["volcano", "lava"],
        nearest: "magma",
        others: ["crater", "basalt", "caldera", "pumice"],
    },
    Theme {
        qid: "302",
        query: ["glacier", "frost"],
        nearest: "tundra",
        others: ["fjord", "moraine", "permafrost", "iceberg"],
    },
    Theme {
        qid: "303",
        query: ["comet", "orbit"],
        nearest: "asteroid",
        others: ["nebula", "meteor", "galaxy", "telescope"],
    },
];

pub struct Doc {
    pub id: String,
    pub words: Vec<String>,
}

pub struct Fixture {
    pub docs: Vec<Doc>,
    /// Planted document id per theme.
    pub planted: Vec<String>,
    /// Relevant document ids per theme, planted document included.
    pub relevant: Vec<Vec<String>>,
    pub distractors: Vec<Vec<String>>,
    pub vectors: Vec<(String, Vec<f64>)>,
    pub fillers: Vec<String>,
}

/// The three occurrence vectors of each planted term, keyed by (doc, term).
pub fn contextual_vectors(fx: &Fixture) -> Vec<(String, String, [Vec<f64>; 3])> {
    THEMES
        .iter()
        .zip(&fx.planted)
        .enumerate()
        .map(|(i, (theme, doc))| {
            let occ = |j: usize| (0..DIM).map(|d| ((i * 31 + j * 7 + d * 3) % 11) as f64 / 10.0 - 0.4).collect();
            (doc.clone(), theme.nearest.to_string(), [occ(0), occ(1), occ(2)])
        })
        .collect()
}

fn pseudo_words(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v"];
    const VOWELS: [&str; 4] = ["a", "o", "i", "u"];
    let stop = Stoplist::smart();
    let mut out: Vec<String> = Vec::new();
    while out.len() < n {
        let w: String = (0..3)
            .map(|_| format!("{}{}", ONSETS[rng.gen_range(0..12)], VOWELS[rng.gen_range(0..4)]))
            .collect();
        if !stop.contains(&w) && !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

fn unit(rng: &mut ChaCha8Rng, dims: std::ops::Range<usize>) -> Vec<f64> {
    let mut v = [0.0; DIM];
    for d in dims {
        v[d] = rng.gen_range(-1.0..1.0);
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

pub fn crafted() -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_917);
    let fillers = pseudo_words(&mut rng, 200);
    let pick = |rng: &mut ChaCha8Rng, n: usize| -> Vec<String> {
        (0..n).map(|_| fillers.choose(rng).unwrap().clone()).collect()
    };

    let mut docs = Vec::new();
    let mut planted = Vec::new();
    let mut relevant = Vec::new();
    let mut distractors = Vec::new();
    let mut next_id = {
        let mut n = 0;
        move || {
            n += 1;
            format!("CRAFT-{n:04}")
        }
    };

    for theme in &THEMES {
        let mut rel = Vec::new();
        for j in 0..5 {
            let mut words = pick(&mut rng, 15);
            words.extend(theme.query.iter().map(|s| s.to_string()));
            if j % 2 == 0 {
                words.push(theme.query[0].into());
            }
            words.push(theme.nearest.into());
            words.push(theme.others[j % 4].into());
            words.push(theme.others[(j + 1) % 4].into());
            words.shuffle(&mut rng);
            let id = next_id();
            rel.push(id.clone());
            docs.push(Doc { id, words });
        }

        let mut dis = Vec::new();
        for j in 0..4 {
            let mut words = pick(&mut rng, 40);
            words.push(theme.query[j % 2].into());
            words.shuffle(&mut rng);
            let id = next_id();
            dis.push(id.clone());
            docs.push(Doc { id, words });
        }

        // Occurrences of the nearest term at both ends and in the middle.
        let mut middle = pick(&mut rng, 12);
        middle.push(theme.others[0].into());
        middle.push(theme.others[2].into());
        middle.shuffle(&mut rng);
        let mut words = vec![theme.nearest.to_string()];
        words.extend(middle[..7].iter().cloned());
        words.push(theme.nearest.into());
        words.extend(middle[7..].iter().cloned());
        words.push(theme.nearest.into());
        let id = next_id();
        rel.push(id.clone());
        planted.push(id.clone());
        docs.push(Doc { id, words });

        relevant.push(rel);
        distractors.push(dis);
    }

    while docs.len() < NUM_DOCS {
        let n = rng.gen_range(20..60);
        let words = pick(&mut rng, n);
        docs.push(Doc { id: next_id(), words });
    }

    let mut vectors = Vec::new();
    for (i, theme) in THEMES.iter().enumerate() {
        let mut q = [vec![0.0; DIM], vec![0.0; DIM]];
        for (k, v) in q.iter_mut().enumerate() {
            v[i] = 1.0;
            v[3 + i + k] = 0.3;
        }
        let mut nearest = vec![0.0; DIM];
        nearest[i] = 1.0;
        nearest[3 + i] = 0.15;
        nearest[4 + i] = 0.15;
        vectors.push((theme.query[0].to_string(), q[0].clone()));
        vectors.push((theme.query[1].to_string(), q[1].clone()));
        vectors.push((theme.nearest.to_string(), nearest));
        for w in theme.others {
            let noise = unit(&mut rng, 3..DIM);
            let mut v = vec![0.0; DIM];
            v[i] = 1.0;
            for d in 0..DIM {
                v[d] += 0.6 * noise[d];
            }
            vectors.push((w.to_string(), v));
        }
    }
    for w in &fillers {
        let mut v = unit(&mut rng, 3..DIM);
        for x in v.iter_mut().take(3) {
            *x = rng.gen_range(-0.2..0.2);
        }
        vectors.push((w.clone(), v));
    }

    Fixture {
        docs,
        planted,
        relevant,
        distractors,
        vectors,
        fillers,
    }
}

impl Fixture {
    pub fn trec(&self) -> String {
        let mut out = String::new();
        for d in &self.docs {
            let _ = write!(out, "<DOC>\n<DOCNO> {} </DOCNO>\n<TEXT>\n{}\n</TEXT>\n</DOC>\n", d.id, d.words.join(" "));
        }
        out
    }

    pub fn topics(&self) -> String {
        let mut out = String::new();
        for t in &THEMES {
            let _ = write!(
                out,
                "<top>\n<num> Number: {}\n<title> Topic: {} {}\n<desc> Description:\nDocuments about {}.\n</top>\n\n",
                t.qid, t.query[0], t.query[1], t.query[0]
            );
        }
        out
    }

    pub fn qrels(&self) -> String {
        let mut out = String::new();
        for (i, t) in THEMES.iter().enumerate() {
            for d in &self.relevant[i] {
                let _ = writeln!(out, "{} 0 {d} 1", t.qid);
            }
            for d in &self.distractors[i] {
                let _ = writeln!(out, "{} 0 {d} 0", t.qid);
            }
        }
        out
    }

    pub fn vector_text(&self) -> String {
        let mut out = format!("{} {DIM}\n", self.vectors.len());
        for (w, v) in &self.vectors {
            let comps: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
            let _ = writeln!(out, "{w} {}", comps.join(" "));
        }
        out
    }

    pub fn contextual_text(&self) -> String {
        let mut out = String::new();
        for (doc, term, occs) in contextual_vectors(self) {
            for (j, v) in occs.iter().enumerate() {
                let comps: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                let _ = writeln!(out, "{doc}\t{term}\t{j}\t{}", comps.join(" "));
            }
        }
        out
    }

    pub fn doc(&self, id: &str) -> &Doc {
        self.docs.iter().find(|d| d.id == id).unwrap()
    }
}

pub struct Bundle {
    pub dir: PathBuf,
    pub corpus: PathBuf,
    pub topics: PathBuf,
    pub qrels: PathBuf,
    pub embeddings: PathBuf,
    pub contextual: PathBuf,
    pub config: PathBuf,
}

/// Writes the fixture files and a config referencing them into `dir`.
pub fn write_bundle(dir: &Path) -> Bundle {
    let fx = crafted();
    let path = |name: &str| dir.join(name);
    fs::write(path("corpus.trec"), fx.trec()).unwrap();
    fs::write(path("topics.txt"), fx.topics()).unwrap();
    fs::write(path("qrels.txt"), fx.qrels()).unwrap();
    fs::write(path("vectors.txt"), fx.vector_text()).unwrap();
    fs::write(path("contextual.tsv"), fx.contextual_text()).unwrap();
    fs::write(
        path("experiment.conf"),
        "# crafted fixture\ncorpus = corpus.trec\ntopics = topics.txt\nqrels = qrels.txt\nembeddings = vectors.txt\nindex = crafted.idx\noutput = runs\n",
    )
    .unwrap();
    Bundle {
        dir: dir.to_path_buf(),
        corpus: path("corpus.trec"),
        topics: path("topics.txt"),
        qrels: path("qrels.txt"),
        embeddings: path("vectors.txt"),
        contextual: path("contextual.tsv"),
        config: path("experiment.conf"),
    }
}
