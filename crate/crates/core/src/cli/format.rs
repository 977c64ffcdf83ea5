//! The `stagematch-problem v1` text format and the weights format.
//!
//! ```text
//! stagematch-problem v1
//! variant women-arrive
//!
//! stage 1
//! u1: w1
//! u2: w1
//! w1: u2 u1
//!
//! stage 2
//! ...
//! ```
//!
//! `#` starts a comment. College files use `variant college` with entries
//! `c1 cap 2: s1 s2` and `s1: c1 c2`. The grammar is documented in
//! `docs/FORMAT.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;
use crate::instance::{Instance, ManId, PersonId, Side, WomanId};
use crate::lattice::WeightFn;
use crate::problem::{MultiStageProblem, TwoStageProblem, Variant};
use crate::reductions::{expand_college, CollegeInstance, StudentId, TwoStageCollegeProblem, UniversityId};

pub const HEADER: &str = "stagematch-problem";
pub const VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnsupportedVersion,
    DuplicatePerson,
    UnknownPerson,
    IncompleteList,
    DuplicateRank,
    PreferenceDrift,
    Nesting,
    Capacity,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnsupportedVersion => "unsupported version",
            ParseErrorKind::DuplicatePerson => "duplicate person",
            ParseErrorKind::UnknownPerson => "unknown person",
            ParseErrorKind::IncompleteList => "incomplete list",
            ParseErrorKind::DuplicateRank => "duplicate rank",
            ParseErrorKind::PreferenceDrift => "preference drift",
            ParseErrorKind::Nesting => "roster nesting",
            ParseErrorKind::Capacity => "capacity",
        })
    }
}

/// A diagnostic with 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        kind,
        message: message.into(),
    })
}

/// Contents of a problem file.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)] // built once per file; boxing buys nothing
pub enum Document {
    Single(Instance),
    Staged(MultiStageProblem),
    College(Vec<CollegeInstance>),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Single(_) => "single",
            Document::Staged(_) => "staged",
            Document::College(_) => "college",
        }
    }

    pub fn stage_count(&self) -> usize {
        match self {
            Document::Single(_) => 1,
            Document::Staged(p) => p.len(),
            Document::College(v) => v.len(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FileVariant {
    Single,
    College,
    Staged(Variant),
}

/// Identifier prefixes: men `u`, women `w`, universities `c`, students `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    U,
    W,
    C,
    S,
}

impl Kind {
    fn prefix(self) -> char {
        match self {
            Kind::U => 'u',
            Kind::W => 'w',
            Kind::C => 'c',
            Kind::S => 's',
        }
    }

    fn noun(self) -> &'static str {
        match self {
            Kind::U => "man",
            Kind::W => "woman",
            Kind::C => "university",
            Kind::S => "student",
        }
    }

    fn other(self) -> Kind {
        match self {
            Kind::U => Kind::W,
            Kind::W => Kind::U,
            Kind::C => Kind::S,
            Kind::S => Kind::C,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Id {
    kind: Kind,
    n: u32,
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.n)
    }
}

#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(s: &str, offset: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(b)) => {
                out.push(Token {
                    text: &s[b..i],
                    column: offset + s[..b].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn parse_id(tok: &Token<'_>, line: usize) -> Result<Id, ParseError> {
    let mut chars = tok.text.chars();
    let kind = match chars.next() {
        Some('u') => Kind::U,
        Some('w') => Kind::W,
        Some('c') => Kind::C,
        Some('s') => Kind::S,
        _ => {
            return err(
                line,
                tok.column,
                ParseErrorKind::Syntax,
                format!("expected a person id, found `{}`", tok.text),
            )
        }
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return err(
            line,
            tok.column,
            ParseErrorKind::Syntax,
            format!("malformed id `{}`", tok.text),
        );
    }
    match digits.parse::<u32>() {
        Ok(n) => Ok(Id { kind, n }),
        Err(_) => err(
            line,
            tok.column,
            ParseErrorKind::Syntax,
            format!("id `{}` is out of range", tok.text),
        ),
    }
}

struct Entry {
    id: Id,
    line: usize,
    column: usize,
    capacity: Option<usize>,
    list: Vec<(Id, usize)>,
}

struct Stage {
    header_line: usize,
    entries: Vec<Entry>,
}

impl Stage {
    fn line_of(&self, id: Id) -> (usize, usize) {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .map(|e| (e.line, e.column))
            .unwrap_or((self.header_line, 1))
    }
}

/// Parses and validates a problem file.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut header_seen = false;
    let mut variant: Option<FileVariant> = None;
    let mut stages: Vec<Stage> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content, 0);
        if toks.is_empty() {
            continue;
        }
        if !header_seen {
            if toks[0].text != HEADER {
                return err(
                    line,
                    toks[0].column,
                    ParseErrorKind::Syntax,
                    format!("expected `{HEADER} {VERSION}`"),
                );
            }
            match toks.get(1) {
                Some(t) if t.text == VERSION && toks.len() == 2 => {}
                Some(t) => {
                    return err(
                        line,
                        t.column,
                        ParseErrorKind::UnsupportedVersion,
                        format!("version `{}`", t.text),
                    )
                }
                None => return err(line, content.len() + 1, ParseErrorKind::Syntax, "missing version"),
            }
            header_seen = true;
            continue;
        }
        if toks[0].text == "variant" {
            if variant.is_some() {
                return err(line, 1, ParseErrorKind::Syntax, "variant given twice");
            }
            if toks.len() != 2 {
                return err(
                    line,
                    toks[0].column,
                    ParseErrorKind::Syntax,
                    "expected `variant <name>`",
                );
            }
            variant = Some(match toks[1].text {
                "single" => FileVariant::Single,
                "college" => FileVariant::College,
                other => match other.parse::<Variant>() {
                    Ok(v) => FileVariant::Staged(v),
                    Err(_) => {
                        return err(
                            line,
                            toks[1].column,
                            ParseErrorKind::Syntax,
                            format!("unknown variant `{other}`"),
                        )
                    }
                },
            });
            continue;
        }
        if variant.is_none() {
            return err(
                line,
                toks[0].column,
                ParseErrorKind::Syntax,
                "expected `variant <name>` before stages",
            );
        }
        if toks[0].text == "stage" {
            let expected = stages.len() + 1;
            let ok = toks.len() == 2 && toks[1].text.parse::<usize>().ok() == Some(expected);
            if !ok {
                return err(
                    line,
                    toks[0].column,
                    ParseErrorKind::Syntax,
                    format!("expected `stage {expected}`"),
                );
            }
            stages.push(Stage {
                header_line: line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(stage) = stages.last_mut() else {
            return err(
                line,
                toks[0].column,
                ParseErrorKind::Syntax,
                "expected `stage 1` before entries",
            );
        };
        stage
            .entries
            .push(parse_entry(content, line, variant == Some(FileVariant::College))?);
    }

    if !header_seen {
        return err(
            last_line.max(1),
            1,
            ParseErrorKind::Syntax,
            format!("missing `{HEADER} {VERSION}` header"),
        );
    }
    let Some(variant) = variant else {
        return err(last_line, 1, ParseErrorKind::Syntax, "missing `variant` line");
    };
    if stages.is_empty() {
        return err(last_line, 1, ParseErrorKind::Syntax, "no stages");
    }
    match variant {
        FileVariant::Single => {
            if stages.len() != 1 {
                return err(
                    stages[1].header_line,
                    1,
                    ParseErrorKind::Syntax,
                    "a single instance has one stage",
                );
            }
            Ok(Document::Single(build_instance(&stages[0])?))
        }
        FileVariant::Staged(v) => {
            if stages.len() < 2 {
                return err(
                    stages[0].header_line,
                    1,
                    ParseErrorKind::Syntax,
                    "a staged problem needs two stages",
                );
            }
            let insts = stages.iter().map(build_instance).collect::<Result<Vec<_>, _>>()?;
            for t in 1..insts.len() {
                if let Err(e) = TwoStageProblem::new(v, insts[t - 1].clone(), insts[t].clone()) {
                    return Err(transition_error(&stages[t], e));
                }
            }
            let p = MultiStageProblem::new(v, insts).expect("transitions checked");
            Ok(Document::Staged(p))
        }
        FileVariant::College => {
            if stages.len() > 2 {
                return err(
                    stages[2].header_line,
                    1,
                    ParseErrorKind::Syntax,
                    "college files have one or two stages",
                );
            }
            let cis = stages.iter().map(build_college).collect::<Result<Vec<_>, _>>()?;
            if cis.len() == 2 {
                if let Err(e) = TwoStageCollegeProblem::new(cis[0].clone(), cis[1].clone()) {
                    return Err(college_transition_error(&stages[1], &cis[0], e));
                }
            }
            Ok(Document::College(cis))
        }
    }
}

fn parse_entry(content: &str, line: usize, college: bool) -> Result<Entry, ParseError> {
    let Some(colon) = content.find(':') else {
        let first = tokens(content, 0)[0].column;
        return err(
            line,
            first,
            ParseErrorKind::Syntax,
            "expected `<id>: <preference list>`",
        );
    };
    let head = tokens(&content[..colon], 0);
    let tail = tokens(&content[colon + 1..], content[..colon + 1].chars().count());
    if head.is_empty() {
        return err(line, colon + 1, ParseErrorKind::Syntax, "missing person before `:`");
    }
    let id = parse_id(&head[0], line)?;
    let allowed = if college {
        [Kind::C, Kind::S]
    } else {
        [Kind::U, Kind::W]
    };
    if !allowed.contains(&id.kind) {
        let what = if college { "`c` or `s`" } else { "`u` or `w`" };
        return err(
            line,
            head[0].column,
            ParseErrorKind::Syntax,
            format!("expected a {what} id, found `{id}`"),
        );
    }
    let capacity = if id.kind == Kind::C {
        if head.len() != 3 || head[1].text != "cap" {
            return err(
                line,
                head[0].column,
                ParseErrorKind::Syntax,
                format!("expected `{id} cap <n>:`"),
            );
        }
        match head[2].text.parse::<usize>() {
            Ok(0) => {
                return err(
                    line,
                    head[2].column,
                    ParseErrorKind::Capacity,
                    format!("{id} has capacity 0"),
                )
            }
            Ok(c) => Some(c),
            Err(_) => {
                return err(
                    line,
                    head[2].column,
                    ParseErrorKind::Syntax,
                    format!("bad capacity `{}`", head[2].text),
                )
            }
        }
    } else {
        if head.len() != 1 {
            return err(
                line,
                head[1].column,
                ParseErrorKind::Syntax,
                "unexpected token before `:`",
            );
        }
        None
    };
    let mut list = Vec::new();
    for t in &tail {
        let x = parse_id(t, line)?;
        if x.kind != id.kind.other() {
            let msg = format!("{id} must rank {}s, found `{x}`", id.kind.other().noun());
            return err(line, t.column, ParseErrorKind::Syntax, msg);
        }
        list.push((x, t.column));
    }
    Ok(Entry {
        id,
        line,
        column: head[0].column,
        capacity,
        list,
    })
}

/// Checks the rosters and lists of one stage, pointing at the offending entry.
fn validate_stage(stage: &Stage, a: Kind, b: Kind) -> Result<(), ParseError> {
    let mut seen: BTreeSet<Id> = BTreeSet::new();
    for e in &stage.entries {
        if !seen.insert(e.id) {
            return err(
                e.line,
                e.column,
                ParseErrorKind::DuplicatePerson,
                format!("{} defined twice", e.id),
            );
        }
    }
    let roster = |k: Kind| seen.iter().filter(|i| i.kind == k).copied().collect::<BTreeSet<Id>>();
    let (ra, rb) = (roster(a), roster(b));
    for e in &stage.entries {
        let other = if e.id.kind == a { &rb } else { &ra };
        let mut listed = BTreeSet::new();
        for &(x, col) in &e.list {
            if !other.contains(&x) {
                return err(
                    e.line,
                    col,
                    ParseErrorKind::UnknownPerson,
                    format!("{x} is not in this stage"),
                );
            }
            if !listed.insert(x) {
                return err(
                    e.line,
                    col,
                    ParseErrorKind::DuplicateRank,
                    format!("{} ranks {x} more than once", e.id),
                );
            }
        }
        if listed.len() != other.len() {
            let missing: Vec<String> = other.difference(&listed).map(|x| x.to_string()).collect();
            let msg = format!("list of {} is incomplete, missing {}", e.id, missing.join(" "));
            return err(e.line, e.column, ParseErrorKind::IncompleteList, msg);
        }
    }
    Ok(())
}

fn build_instance(stage: &Stage) -> Result<Instance, ParseError> {
    validate_stage(stage, Kind::U, Kind::W)?;
    let mut men = Vec::new();
    let mut women = Vec::new();
    for e in &stage.entries {
        match e.id.kind {
            Kind::U => men.push((ManId(e.id.n), e.list.iter().map(|(x, _)| WomanId(x.n)).collect())),
            _ => women.push((WomanId(e.id.n), e.list.iter().map(|(x, _)| ManId(x.n)).collect())),
        }
    }
    Instance::new(men, women).or_else(|e| err(stage.header_line, 1, ParseErrorKind::Syntax, e.to_string()))
}

fn build_college(stage: &Stage) -> Result<CollegeInstance, ParseError> {
    validate_stage(stage, Kind::C, Kind::S)?;
    let mut unis = Vec::new();
    let mut studs = Vec::new();
    for e in &stage.entries {
        match e.id.kind {
            Kind::C => unis.push((
                UniversityId(e.id.n),
                e.capacity.expect("universities carry a capacity"),
                e.list.iter().map(|(x, _)| StudentId(x.n)).collect(),
            )),
            _ => studs.push((
                StudentId(e.id.n),
                e.list.iter().map(|(x, _)| UniversityId(x.n)).collect(),
            )),
        }
    }
    CollegeInstance::new(unis, studs).or_else(|e| err(stage.header_line, 1, ParseErrorKind::Syntax, e.to_string()))
}

fn id_of(p: PersonId) -> Id {
    let kind = if p.side == Side::Man { Kind::U } else { Kind::W };
    Id { kind, n: p.index }
}

fn transition_error(later: &Stage, e: Error) -> ParseError {
    let header = |kind, msg: String| ParseError {
        line: later.header_line,
        column: 1,
        kind,
        message: msg,
    };
    match e {
        Error::PreferenceDrift { person, .. } => {
            let id = id_of(person);
            let (line, column) = later.line_of(id);
            let message = format!("{id} ranks shared persons differently than in the previous stage");
            ParseError {
                line,
                column,
                kind: ParseErrorKind::PreferenceDrift,
                message,
            }
        }
        Error::Nesting { .. } => header(ParseErrorKind::Nesting, e.to_string()),
        other => header(ParseErrorKind::Syntax, other.to_string()),
    }
}

fn college_transition_error(later: &Stage, first: &CollegeInstance, e: Error) -> ParseError {
    match e {
        Error::PreferenceDrift { person, .. } => {
            let id = if person.side == Side::Woman {
                Id {
                    kind: Kind::S,
                    n: person.index,
                }
            } else {
                let (_, map) = expand_college(first);
                let (c, _) = map.seat_of(ManId(person.index)).expect("seat of the expanded instance");
                Id { kind: Kind::C, n: c.0 }
            };
            let (line, column) = later.line_of(id);
            let message = format!("{id} ranks shared persons differently than in the previous stage");
            ParseError {
                line,
                column,
                kind: ParseErrorKind::PreferenceDrift,
                message,
            }
        }
        other => ParseError {
            line: later.header_line,
            column: 1,
            kind: ParseErrorKind::Nesting,
            message: other.to_string(),
        },
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_instance(out: &mut String, inst: &Instance) {
    for &u in inst.men() {
        let list = inst.man_list(u).unwrap();
        out.push_str(&format!(
            "u{}: {}\n",
            u.0,
            join(list.iter().map(|w| format!("w{}", w.0)))
        ));
    }
    for &w in inst.women() {
        let list = inst.woman_list(w).unwrap();
        out.push_str(&format!(
            "w{}: {}\n",
            w.0,
            join(list.iter().map(|u| format!("u{}", u.0)))
        ));
    }
}

fn write_college(out: &mut String, ci: &CollegeInstance) {
    for c in ci.universities() {
        let list = ci.university_list(c).unwrap();
        out.push_str(&format!("{c} cap {}: {}\n", ci.capacity(c).unwrap(), join(list)));
    }
    for s in ci.students() {
        out.push_str(&format!("{s}: {}\n", join(ci.student_list(s).unwrap())));
    }
}

/// Canonical text: comments dropped, persons sorted by side then index.
pub fn write_document(doc: &Document) -> String {
    let mut out = format!("{HEADER} {VERSION}\n");
    let variant = match doc {
        Document::Single(_) => "single".to_string(),
        Document::Staged(p) => p.variant().to_string(),
        Document::College(_) => "college".to_string(),
    };
    out.push_str(&format!("variant {variant}\n"));
    for t in 0..doc.stage_count() {
        out.push_str(&format!("\nstage {}\n", t + 1));
        match doc {
            Document::Single(i) => write_instance(&mut out, i),
            Document::Staged(p) => write_instance(&mut out, &p.stages()[t]),
            Document::College(v) => write_college(&mut out, &v[t]),
        }
    }
    out
}

/// Weights file: one `u<i> w<j> <integer>` triple per line, `#` comments.
/// Pairs not listed weigh 0; a pair listed twice is an error.
pub fn parse_weights(text: &str) -> Result<WeightFn, ParseError> {
    let mut seen: BTreeMap<(ManId, WomanId), usize> = BTreeMap::new();
    let mut f = WeightFn::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw.split('#').next().unwrap_or(""), 0);
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 3 {
            return err(
                line,
                toks[0].column,
                ParseErrorKind::Syntax,
                "expected `u<i> w<j> <weight>`",
            );
        }
        let (u, w) = (parse_id(&toks[0], line)?, parse_id(&toks[1], line)?);
        if u.kind != Kind::U {
            return err(
                line,
                toks[0].column,
                ParseErrorKind::Syntax,
                format!("expected a man, found `{u}`"),
            );
        }
        if w.kind != Kind::W {
            return err(
                line,
                toks[1].column,
                ParseErrorKind::Syntax,
                format!("expected a woman, found `{w}`"),
            );
        }
        let Ok(x) = toks[2].text.parse::<i64>() else {
            return err(
                line,
                toks[2].column,
                ParseErrorKind::Syntax,
                format!("bad weight `{}`", toks[2].text),
            );
        };
        let key = (ManId(u.n), WomanId(w.n));
        if let Some(prev) = seen.insert(key, line) {
            return err(
                line,
                toks[0].column,
                ParseErrorKind::DuplicateRank,
                format!("pair ({u}, {w}) already on line {prev}"),
            );
        }
        f.set(key.0, key.1, x);
    }
    Ok(f)
}
