//! Parser and serializer for the presentation/endomorphism file format.
//!
//! ```text
//! [group]
//! free_generators = a b
//! cosets = 1 t
//! rel t a = a^-1 t
//! rel t t = 1 1
//!
//! [endo phi]
//! a -> a b a
//! b -> 1
//! t -> x x t
//! ```
//!
//! Twist lines rewrite `t a = <word> t`; product lines end in a coset name.
//! In endomorphism blocks a missing trailing coset means coset `1`. Lines
//! starting with `#` are comments.

use crate::error::ParseError;
use crate::vfree::{GElement, GEndo, VFPresentation};
use crate::words::{Alphabet, Word};

/// A parsed input file: the presentation and its named endomorphisms.
#[derive(Debug, Clone, PartialEq)]
pub struct InputFile {
    pub presentation: VFPresentation,
    pub endos: Vec<(String, GEndo)>,
}

impl InputFile {
    pub fn endo(&self, name: &str) -> Option<&GEndo> {
        self.endos
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }

    pub fn endo_names(&self) -> Vec<String> {
        self.endos.iter().map(|(n, _)| n.clone()).collect()
    }
}

pub fn parse_input(text: &str) -> Result<InputFile, ParseError> {
    Parser::new(text).parse()
}

/// Parses an element: word tokens optionally followed by a coset name.
pub fn parse_element(pres: &VFPresentation, text: &str) -> Result<GElement, String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err("empty element; write `1` for the identity".to_string());
    }
    let (word_tokens, coset) = split_coset(pres, &tokens);
    let word = if word_tokens.is_empty() {
        Word::identity()
    } else {
        pres.alphabet().parse_word(&word_tokens.join(" "))?
    };
    Ok(GElement::new(word, coset))
}

fn split_coset<'a>(pres: &VFPresentation, tokens: &[&'a str]) -> (Vec<&'a str>, usize) {
    if tokens.len() >= 2 || (tokens.len() == 1 && tokens[0] != "1") {
        if let Some(c) = pres.coset_index(tokens[tokens.len() - 1]) {
            return (tokens[..tokens.len() - 1].to_vec(), c);
        }
    }
    (tokens.to_vec(), 0)
}

struct Line {
    number: usize,
    text: String,
}

struct Parser {
    lines: Vec<Line>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Parser {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| Line {
                number: i + 1,
                text: l.trim().to_string(),
            })
            .filter(|l| !l.text.is_empty() && !l.text.starts_with('#'))
            .collect();
        Parser { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&Line> {
        self.lines.get(self.pos)
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(line, col, msg)
    }

    fn parse(mut self) -> Result<InputFile, ParseError> {
        let header = match self.peek() {
            Some(l) if l.text == "[group]" => {
                let n = l.number;
                self.pos += 1;
                n
            }
            Some(l) => return Err(self.err(l.number, 1, "expected `[group]` header")),
            None => return Err(self.err(1, 1, "missing [group] section")),
        };

        let mut generators: Option<(usize, Vec<String>)> = None;
        let mut cosets: Option<Vec<String>> = None;
        let mut rel_lines: Vec<(usize, String)> = Vec::new();
        while let Some(l) = self.peek() {
            if l.text.starts_with('[') {
                break;
            }
            let number = l.number;
            let text = l.text.clone();
            self.pos += 1;
            if let Some(rest) = text.strip_prefix("free_generators") {
                let rest = expect_eq(rest).map_err(|c| self.err(number, c, "expected `=`"))?;
                generators = Some((
                    number,
                    rest.split_whitespace().map(str::to_string).collect(),
                ));
            } else if let Some(rest) = text.strip_prefix("cosets") {
                let rest = expect_eq(rest).map_err(|c| self.err(number, c, "expected `=`"))?;
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.first().map(String::as_str) != Some("1") {
                    return Err(self.err(number, 1, "first coset token must be `1`"));
                }
                cosets = Some(names);
            } else if text.starts_with("rel ") {
                rel_lines.push((number, text));
            } else {
                return Err(self.err(
                    number,
                    1,
                    "expected `free_generators`, `cosets`, `rel`, or a section header",
                ));
            }
        }

        let (gen_line, gen_names) =
            generators.ok_or_else(|| self.err(header, 1, "missing `free_generators` line"))?;
        let alphabet = Alphabet::new(gen_names)
            .map_err(|msg| self.err(gen_line, 1, msg))?;
        let coset_names = cosets.unwrap_or_else(|| vec!["1".to_string()]);
        let m = coset_names.len();
        let coset_of = |name: &str| coset_names.iter().position(|n| n == name);

        let n = alphabet.size();
        let mut twist: Vec<Vec<Option<Word>>> = vec![vec![None; n]; m];
        let mut prod: Vec<Vec<Option<(Word, usize)>>> = vec![vec![None; m]; m];
        for (number, text) in rel_lines {
            self.parse_rel(
                number, &text, &alphabet, &coset_names, &mut twist, &mut prod,
            )?;
        }

        // Completeness of the tables.
        let mut twist_rows = Vec::new();
        for (i, row) in twist.into_iter().enumerate().skip(1) {
            let mut out = Vec::new();
            for (a, entry) in row.into_iter().enumerate() {
                out.push(entry.ok_or_else(|| {
                    self.err(
                        header,
                        1,
                        format!(
                            "missing twist relation `rel {} {} = ...`",
                            coset_names[i],
                            alphabet.name(a as u32)
                        ),
                    )
                })?);
            }
            twist_rows.push(out);
        }
        let mut prod_rows = Vec::new();
        for (i, row) in prod.into_iter().enumerate().skip(1) {
            let mut out = Vec::new();
            for (j, entry) in row.into_iter().enumerate().skip(1) {
                out.push(entry.ok_or_else(|| {
                    self.err(
                        header,
                        1,
                        format!(
                            "missing product relation `rel {} {} = ...`",
                            coset_names[i], coset_names[j]
                        ),
                    )
                })?);
            }
            prod_rows.push(out);
        }

        let presentation =
            VFPresentation::new(alphabet, coset_names.clone(), twist_rows, prod_rows)
                .map_err(|e| self.err(header, 1, e.to_string()))?;

        let mut endos = Vec::new();
        while let Some(l) = self.peek() {
            let number = l.number;
            let text = l.text.clone();
            let name = text
                .strip_prefix("[endo ")
                .and_then(|r| r.strip_suffix(']'))
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| self.err(number, 1, "expected `[endo NAME]` header"))?
                .to_string();
            self.pos += 1;
            let endo = self.parse_endo_block(&presentation, number, &name, coset_of)?;
            endos.push((name, endo));
        }

        Ok(InputFile {
            presentation,
            endos,
        })
    }

    fn parse_rel(
        &self,
        number: usize,
        text: &str,
        alphabet: &Alphabet,
        coset_names: &[String],
        twist: &mut [Vec<Option<Word>>],
        prod: &mut [Vec<Option<(Word, usize)>>],
    ) -> Result<(), ParseError> {
        let body = text.strip_prefix("rel ").expect("caller checked");
        let (lhs, rhs) = body
            .split_once('=')
            .ok_or_else(|| self.err(number, 1, "relation needs `=`"))?;
        let lhs_tokens: Vec<&str> = lhs.split_whitespace().collect();
        if lhs_tokens.len() != 2 {
            return Err(self.err(number, 1, "relation left side must be `<coset> <letter|coset>`"));
        }
        let coset = coset_names
            .iter()
            .position(|n| n == lhs_tokens[0])
            .ok_or_else(|| self.err(number, 1, format!("unknown coset `{}`", lhs_tokens[0])))?;
        if coset == 0 {
            return Err(self.err(number, 1, "relations for the identity coset are implicit"));
        }
        let rhs_tokens: Vec<&str> = rhs.split_whitespace().collect();
        if rhs_tokens.is_empty() {
            return Err(self.err(number, 1, "relation right side is empty"));
        }
        let tail = rhs_tokens[rhs_tokens.len() - 1];
        let word_tokens = &rhs_tokens[..rhs_tokens.len() - 1];
        let word = if word_tokens.is_empty() || word_tokens == ["1"] {
            Word::identity()
        } else {
            alphabet
                .parse_word(&word_tokens.join(" "))
                .map_err(|msg| self.err(number, 1, msg))?
        };

        if let Some(gen) = alphabet.index_of(lhs_tokens[1]) {
            // Twist: rel t a = <word> t
            if tail != lhs_tokens[0] {
                return Err(self.err(
                    number,
                    1,
                    format!("twist relation must end with `{}`", lhs_tokens[0]),
                ));
            }
            if twist[coset][gen as usize].is_some() {
                return Err(self.err(number, 1, "duplicate twist relation"));
            }
            twist[coset][gen as usize] = Some(word);
        } else if let Some(rhs_coset) = coset_names.iter().position(|n| n == tail) {
            // Product: rel t s = <word> <coset>
            let other = coset_names
                .iter()
                .position(|n| n == lhs_tokens[1])
                .ok_or_else(|| {
                    self.err(number, 1, format!("unknown symbol `{}`", lhs_tokens[1]))
                })?;
            if other == 0 {
                return Err(self.err(number, 1, "products with the identity coset are implicit"));
            }
            if prod[coset][other].is_some() {
                return Err(self.err(number, 1, "duplicate product relation"));
            }
            prod[coset][other] = Some((word, rhs_coset));
        } else {
            return Err(self.err(
                number,
                1,
                format!("`{}` is neither a generator nor a coset", lhs_tokens[1]),
            ));
        }
        Ok(())
    }

    fn parse_endo_block(
        &mut self,
        pres: &VFPresentation,
        header_line: usize,
        name: &str,
        coset_of: impl Fn(&str) -> Option<usize>,
    ) -> Result<GEndo, ParseError> {
        let mut letter_images: Vec<Option<GElement>> = vec![None; pres.free_rank()];
        let mut coset_images: Vec<Option<GElement>> = vec![None; pres.coset_count()];
        coset_images[0] = Some(GElement::identity());
        while let Some(l) = self.peek() {
            if l.text.starts_with('[') {
                break;
            }
            let number = l.number;
            let text = l.text.clone();
            self.pos += 1;
            let (lhs, rhs) = text
                .split_once("->")
                .ok_or_else(|| self.err(number, 1, "endomorphism line needs `->`"))?;
            let target = lhs.trim();
            let image = parse_element(pres, rhs.trim())
                .map_err(|msg| self.err(number, 1, msg))?;
            if let Some(gen) = pres.alphabet().index_of(target) {
                if letter_images[gen as usize].is_some() {
                    return Err(self.err(number, 1, format!("duplicate image for `{target}`")));
                }
                letter_images[gen as usize] = Some(image);
            } else if let Some(c) = coset_of(target) {
                if c == 0 {
                    return Err(self.err(number, 1, "the identity coset has no assignable image"));
                }
                if coset_images[c].is_some() {
                    return Err(self.err(number, 1, format!("duplicate image for `{target}`")));
                }
                coset_images[c] = Some(image);
            } else {
                return Err(self.err(
                    number,
                    1,
                    format!("`{target}` is neither a generator nor a coset"),
                ));
            }
        }
        let mut letters = Vec::with_capacity(letter_images.len());
        for (g, img) in letter_images.into_iter().enumerate() {
            letters.push(img.ok_or_else(|| {
                self.err(
                    header_line,
                    1,
                    format!(
                        "endo `{name}` is missing an image for generator `{}`",
                        pres.alphabet().name(g as u32)
                    ),
                )
            })?);
        }
        let mut cosets = Vec::with_capacity(coset_images.len());
        for (c, img) in coset_images.into_iter().enumerate() {
            cosets.push(img.ok_or_else(|| {
                self.err(
                    header_line,
                    1,
                    format!(
                        "endo `{name}` is missing an image for coset `{}`",
                        pres.coset_name(c)
                    ),
                )
            })?);
        }
        GEndo::new(pres, letters, cosets)
            .map_err(|e| self.err(header_line, 1, e.to_string()))
    }
}

fn expect_eq(rest: &str) -> Result<&str, usize> {
    let trimmed = rest.trim_start();
    match trimmed.strip_prefix('=') {
        Some(r) => Ok(r),
        None => Err(1),
    }
}

/// Canonical serialization; `parse(serialize(parse(t)))` equals `parse(t)`.
pub fn serialize(input: &InputFile) -> String {
    let pres = &input.presentation;
    let mut out = String::from("[group]\n");
    out.push_str(&format!("free_generators = {}\n", pres.alphabet()));
    if pres.coset_count() > 1 {
        let names: Vec<&str> = (0..pres.coset_count()).map(|i| pres.coset_name(i)).collect();
        out.push_str(&format!("cosets = {}\n", names.join(" ")));
        for i in 1..pres.coset_count() {
            for a in 0..pres.free_rank() as u32 {
                out.push_str(&format!(
                    "rel {} {} = {} {}\n",
                    pres.coset_name(i),
                    pres.alphabet().name(a),
                    pres.alphabet().format_word(pres.twist_word(i, a)),
                    pres.coset_name(i)
                ));
            }
        }
        for i in 1..pres.coset_count() {
            for j in 1..pres.coset_count() {
                let (v, r) = pres.product_rule(i, j);
                out.push_str(&format!(
                    "rel {} {} = {} {}\n",
                    pres.coset_name(i),
                    pres.coset_name(j),
                    pres.alphabet().format_word(v),
                    pres.coset_name(r)
                ));
            }
        }
    }
    for (name, endo) in &input.endos {
        out.push_str(&format!("\n[endo {name}]\n"));
        for g in 0..pres.free_rank() as u32 {
            out.push_str(&format!(
                "{} -> {}\n",
                pres.alphabet().name(g),
                pres.format_element(endo.letter_image(g))
            ));
        }
        for c in 1..pres.coset_count() {
            out.push_str(&format!(
                "{} -> {}\n",
                pres.coset_name(c),
                pres.format_element(endo.coset_image(c))
            ));
        }
    }
    out
}

/// Convenience used across the test suites.
pub fn must_parse(text: &str) -> InputFile {
    match parse_input(text) {
        Ok(f) => f,
        Err(e) => panic!("fixture failed to parse: {e}"),
    }
}
