//! Line-based text formats for lattices and maps. `#` starts a comment.
//!
//! ```text
//! lattice M3
//! elements: 0 a b c 1
//! covers: 0<a 0<b 0<c a<1 b<1 c<1
//! ```
//!
//! ```text
//! map f : M3 -> M3
//! class: power
//! a -> a
//! b -> b
//! c -> c
//! 1 -> a b c
//! ```
//!
//! A map lists every nonzero source element exactly once. `-` is the empty
//! image of a power map or an undefined value of a partial function.

use thiserror::Error;

use crate::lattice::{ElemSet, FiniteLattice, LatticeError};
use crate::morphisms::{
    JoinMap, LatticeMorphism, LatticeRef, MonotoneZeroMap, MorphismClass, MorphismError, PartialFunction, PowerMap,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

fn parse_err(line: usize, message: impl Into<String>) -> TextError {
    TextError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-blank lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn parse_lattice(text: &str) -> Result<FiniteLattice, TextError> {
    let mut name: Option<String> = None;
    let mut elements: Option<Vec<String>> = None;
    let mut covers: Vec<(String, String)> = Vec::new();
    let mut last_line = 0;
    for (n, line) in content_lines(text) {
        last_line = n;
        if let Some(rest) = line.strip_prefix("elements:") {
            if elements.is_some() {
                return Err(parse_err(n, "duplicate `elements:` line"));
            }
            elements = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = line.strip_prefix("covers:") {
            for pair in rest.split_whitespace() {
                let (lo, hi) = pair
                    .split_once('<')
                    .filter(|(lo, hi)| !lo.is_empty() && !hi.is_empty() && !hi.contains('<'))
                    .ok_or_else(|| parse_err(n, format!("malformed cover `{pair}`, expected `x<y`")))?;
                covers.push((lo.to_string(), hi.to_string()));
            }
        } else if let Some(rest) = line.strip_prefix("lattice") {
            let mut words = rest.split_whitespace();
            match (words.next(), words.next(), &name) {
                (Some(w), None, None) => name = Some(w.to_string()),
                (_, _, Some(_)) => return Err(parse_err(n, "duplicate `lattice` line")),
                _ => return Err(parse_err(n, "expected `lattice <name>`")),
            }
        } else {
            return Err(parse_err(n, format!("unexpected line `{line}`")));
        }
    }
    let name = name.ok_or_else(|| parse_err(last_line.max(1), "missing `lattice <name>` line"))?;
    let elements = elements.ok_or_else(|| parse_err(last_line.max(1), "missing `elements:` line"))?;
    Ok(FiniteLattice::build(&name, &elements, &covers)?)
}

pub fn write_lattice(l: &FiniteLattice) -> String {
    let covers: Vec<String> = l
        .covers()
        .into_iter()
        .map(|(x, y)| format!("{}<{}", l.element_name(x), l.element_name(y)))
        .collect();
    format!(
        "lattice {}\nelements: {}\ncovers: {}\n",
        l.name(),
        l.elements().join(" "),
        covers.join(" ")
    )
}

/// A morphism together with the name given in its `map` header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedMorphism {
    pub name: String,
    pub morphism: LatticeMorphism,
}

/// Parses one map; `resolve` looks lattices up by name.
pub fn parse_map(text: &str, resolve: &dyn Fn(&str) -> Option<LatticeRef>) -> Result<NamedMorphism, TextError> {
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| parse_err(1, "empty map file"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let [kw, name, colon, src, arrow, dst] = words[..] else {
        return Err(parse_err(n, "expected `map <name> : <source> -> <target>`"));
    };
    if kw != "map" || colon != ":" || arrow != "->" {
        return Err(parse_err(n, "expected `map <name> : <source> -> <target>`"));
    }
    let lookup = |l: &str| resolve(l).ok_or_else(|| parse_err(n, format!("unknown lattice `{l}`")));
    let (source, target) = (lookup(src)?, lookup(dst)?);

    let (n, class_line) = lines.next().ok_or_else(|| parse_err(n, "missing `class:` line"))?;
    let class: MorphismClass = class_line
        .strip_prefix("class:")
        .ok_or_else(|| parse_err(n, "expected `class: <join|monotone|partial|power>`"))?
        .trim()
        .parse()
        .map_err(|e: String| parse_err(n, e))?;

    let mut entries: Vec<Option<Vec<usize>>> = vec![None; source.len()];
    let mut last = n;
    for (n, line) in lines {
        last = n;
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| parse_err(n, "expected `<element> -> <image>`"))?;
        let lhs = lhs.trim();
        let x = source
            .index_of(lhs)
            .filter(|&x| x != source.bottom())
            .ok_or_else(|| parse_err(n, format!("`{lhs}` is not a nonzero element of `{}`", source.name())))?;
        if entries[x].is_some() {
            return Err(parse_err(n, format!("duplicate line for `{lhs}`")));
        }
        let rhs: Vec<&str> = rhs.split_whitespace().collect();
        let image: Vec<usize> = match rhs[..] {
            ["-"] => Vec::new(),
            [] => return Err(parse_err(n, "missing image")),
            _ => rhs
                .iter()
                .map(|y| {
                    target
                        .index_of(y)
                        .ok_or_else(|| parse_err(n, format!("`{y}` is not in `{}`", target.name())))
                })
                .collect::<Result<_, _>>()?,
        };
        let single = matches!(class, MorphismClass::Join | MorphismClass::MonotoneZero);
        if single && image.len() != 1 || class == MorphismClass::Partial && image.len() > 1 {
            return Err(parse_err(n, format!("a `{class}` map takes a single image element")));
        }
        entries[x] = Some(image);
    }
    if let Some(missing) = source.nonzero().iter().find(|&x| entries[x].is_none()) {
        return Err(parse_err(
            last,
            format!("no line for `{}`", source.element_name(missing)),
        ));
    }

    let image = |x: usize| entries[x].clone().unwrap_or_default();
    let morphism = match class {
        MorphismClass::Join | MorphismClass::MonotoneZero => {
            let table: Vec<usize> = (0..source.len())
                .map(|x| {
                    if x == source.bottom() {
                        target.bottom()
                    } else {
                        image(x)[0]
                    }
                })
                .collect();
            if class == MorphismClass::Join {
                LatticeMorphism::Join(JoinMap::new(source, target, table)?)
            } else {
                LatticeMorphism::MonotoneZero(MonotoneZeroMap::new(source, target, table)?)
            }
        }
        MorphismClass::Partial => {
            let table = (0..source.len()).map(|x| image(x).first().copied()).collect();
            LatticeMorphism::Partial(PartialFunction::new(source, target, table)?)
        }
        MorphismClass::Power => {
            let images = (0..source.len())
                .map(|x| image(x).into_iter().collect::<ElemSet>())
                .collect();
            LatticeMorphism::Power(PowerMap::new(source, target, images)?)
        }
    };
    Ok(NamedMorphism {
        name: name.to_string(),
        morphism,
    })
}

/// Splits a file holding several maps at each `map` header and parses them all.
pub fn parse_maps(text: &str, resolve: &dyn Fn(&str) -> Option<LatticeRef>) -> Result<Vec<NamedMorphism>, TextError> {
    let mut blocks: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim_start().starts_with("map ") || blocks.is_empty() {
            blocks.push((i, String::new()));
        }
        let block = &mut blocks.last_mut().expect("pushed above").1;
        block.push_str(raw);
        block.push('\n');
    }
    blocks
        .into_iter()
        .filter(|(_, b)| content_lines(b).next().is_some())
        .map(|(offset, b)| {
            parse_map(&b, resolve).map_err(|e| match e {
                TextError::Parse { line, message } => TextError::Parse {
                    line: line + offset,
                    message,
                },
                other => other,
            })
        })
        .collect()
}

pub fn write_map(name: &str, m: &LatticeMorphism) -> String {
    let (source, target) = (m.source(), m.target());
    let mut out = format!(
        "map {name} : {} -> {}\nclass: {}\n",
        source.name(),
        target.name(),
        m.class()
    );
    let names = |s: ElemSet| {
        if s.is_empty() {
            "-".to_string()
        } else {
            s.iter().map(|y| target.element_name(y)).collect::<Vec<_>>().join(" ")
        }
    };
    for x in source.nonzero().iter() {
        let rhs = match m {
            LatticeMorphism::Join(f) => target.element_name(f.apply(x)).to_string(),
            LatticeMorphism::MonotoneZero(f) => target.element_name(f.apply(x)).to_string(),
            LatticeMorphism::Partial(f) => f
                .apply(x)
                .map_or("-".to_string(), |y| target.element_name(y).to_string()),
            LatticeMorphism::Power(g) => names(g.image(x)),
        };
        out.push_str(&format!("{} -> {rhs}\n", source.element_name(x)));
    }
    out
}

pub fn write_power_map(name: &str, g: &PowerMap) -> String {
    write_map(name, &LatticeMorphism::Power(g.clone()))
}
