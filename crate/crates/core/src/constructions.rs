//! Certificates for equivariant maps between representation spheres.
//!
//! A certificate is an expression tree over a few primitive maps (identity,
//! inclusion of a summand, the power map `L^s → L^{ts}`, and the axiomatic
//! Stolz–Meyer map over `Z/p^2`) and combinators (join, composition, the
//! wreath power that climbs one group level, and inflation along
//! `Z/p^{κ+1} → Z/p^κ`). Every node carries its claimed source and target
//! sphere; [`validate_certificate`] re-derives both bottom-up and rejects
//! any node whose claim disagrees, naming the node by its path.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group_rep::{delta, valuation, GroupSpec, RepSpec};

/// `(multiplicity, exponent)` pair: `a · L^u`.
pub type Summand = (u64, u64);

/// `S(⊕ a_j L^{u_j})`, canonically sorted by exponent with no zero
/// multiplicities and no repeated exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SphereType {
    group: GroupSpec,
    summands: Vec<Summand>,
}

impl SphereType {
    /// Canonicalises the pairs; every exponent must lie in `[1, N−1]`.
    pub fn new(group: GroupSpec, pairs: &[Summand]) -> std::result::Result<Self, String> {
        let n = group.order() as u64;
        let mut sorted: Vec<Summand> = Vec::with_capacity(pairs.len());
        for &(a, u) in pairs {
            if u == 0 || u >= n {
                return Err(format!("exponent {u} outside [1, {}]", n - 1));
            }
            if a > 0 {
                sorted.push((a, u));
            }
        }
        sorted.sort_by_key(|&(_, u)| u);
        let mut summands: Vec<Summand> = Vec::with_capacity(sorted.len());
        for (a, u) in sorted {
            match summands.last_mut() {
                Some(last) if last.1 == u => {
                    last.0 = last.0.checked_add(a).ok_or("multiplicity overflow")?
                }
                _ => summands.push((a, u)),
            }
        }
        Ok(Self { group, summands })
    }

    /// `a · L^u`.
    pub fn multiple(group: GroupSpec, a: u64, u: u64) -> std::result::Result<Self, String> {
        Self::new(group, &[(a, u)])
    }

    /// The unit sphere of a representation.
    pub fn of_rep(rep: &RepSpec) -> Self {
        let pairs: Vec<Summand> = rep.exponents().iter().map(|&t| (1, t)).collect();
        Self::new(rep.group(), &pairs).expect("representation exponents lie in [1, N-1]")
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Complex dimension `Σ a`.
    pub fn dim(&self) -> u64 {
        self.summands.iter().map(|&(a, _)| a).sum()
    }

    fn concat(&self, other: &SphereType) -> std::result::Result<SphereType, String> {
        let pairs: Vec<Summand> = self.summands.iter().chain(&other.summands).copied().collect();
        Self::new(self.group, &pairs)
    }

    /// True if the pairs are already in canonical form.
    fn is_canonical(pairs: &[Summand]) -> bool {
        pairs.iter().all(|&(a, _)| a > 0) && pairs.windows(2).all(|w| w[0].1 < w[1].1)
    }
}

impl fmt::Display for SphereType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "S(0)");
        }
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|&(a, u)| if u == 1 { format!("{a}L") } else { format!("{a}L^{u}") })
            .collect();
        write!(f, "S({}) over Z/{}", parts.join(" + "), self.group.order())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Identity { sphere: Vec<Summand> },
    Inclusion { base: Vec<Summand>, extra: Vec<Summand> },
    Power { s: u64, t: u64 },
    StolzMeyer { d: u64 },
    Join(Vec<Certificate>),
    /// `outer ∘ inner`
    Compose { outer: Box<Certificate>, inner: Box<Certificate> },
    WreathPower(Box<Certificate>),
    Inflate(Box<Certificate>),
}

impl Node {
    pub fn kind(&self) -> &'static str {
        match self {
            Node::Identity { .. } => "identity",
            Node::Inclusion { .. } => "inclusion",
            Node::Power { .. } => "power",
            Node::StolzMeyer { .. } => "stolz_meyer",
            Node::Join(_) => "join",
            Node::Compose { .. } => "compose",
            Node::WreathPower(_) => "wreath_power",
            Node::Inflate(_) => "inflate",
        }
    }

    fn children(&self) -> Vec<&Certificate> {
        match self {
            Node::Join(cs) => cs.iter().collect(),
            Node::Compose { outer, inner } => vec![outer, inner],
            Node::WreathPower(c) | Node::Inflate(c) => vec![c],
            _ => Vec::new(),
        }
    }
}

/// A typed map-construction tree with claimed endpoints at every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub group: GroupSpec,
    pub node: Node,
    pub source: Vec<Summand>,
    pub target: Vec<Summand>,
}

/// A rejected certificate: the offending node and the broken rule.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct CertError {
    pub path: String,
    pub message: String,
}

impl CertError {
    fn at(path: &str, message: impl Into<String>) -> Self {
        Self { path: path.to_string(), message: message.into() }
    }
}

type Typing = (SphereType, SphereType);

/// The typing rules, applied to already-typed children.
fn infer(group: GroupSpec, node: &Node, children: &[(GroupSpec, Typing)]) -> std::result::Result<Typing, String> {
    let p = group.p();
    let n = group.order() as u64;
    let same_group = |what: &str| -> std::result::Result<(), String> {
        match children.iter().find(|(g, _)| *g != group) {
            Some((g, _)) => Err(format!("{what} child over Z/{} inside a node over Z/{n}", g.order())),
            None => Ok(()),
        }
    };
    let lower_group = |what: &str| -> std::result::Result<(), String> {
        let (g, _) = &children[0];
        if g.p() != p || g.kappa() + 1 != group.kappa() {
            return Err(format!("{what} needs a child over Z/{}, got Z/{}", n / p, g.order()));
        }
        Ok(())
    };
    match node {
        Node::Identity { sphere } => {
            let s = SphereType::new(group, sphere)?;
            Ok((s.clone(), s))
        }
        Node::Inclusion { base, extra } => {
            let b = SphereType::new(group, base)?;
            let e = SphereType::new(group, extra)?;
            let t = b.concat(&e)?;
            Ok((b, t))
        }
        Node::Power { s, t } => {
            if *s == 0 || *s >= n {
                return Err(format!("power source exponent {s} outside [1, {}]", n - 1));
            }
            if *t == 0 {
                return Err("power map degree must be positive".into());
            }
            let image = ((*s as u128 * *t as u128) % n as u128) as u64;
            if image == 0 {
                return Err(format!("power map {t} kills L^{s}: {t}·{s} ≡ 0 mod {n}"));
            }
            Ok((SphereType::multiple(group, 1, *s)?, SphereType::multiple(group, 1, image)?))
        }
        Node::StolzMeyer { d } => {
            if group.kappa() != 2 {
                return Err(format!("stolz_meyer lives over Z/p^2, node is over Z/{n}"));
            }
            if *d <= 2 {
                return Err(format!("stolz_meyer needs d > 2, got {d}"));
            }
            Ok((SphereType::multiple(group, p * (d - 2), 1)?, SphereType::multiple(group, *d, p)?))
        }
        Node::Join(_) => {
            if children.is_empty() {
                return Err("join needs at least one child".into());
            }
            same_group("join")?;
            let empty = SphereType::new(group, &[])?;
            let mut src = empty.clone();
            let mut tgt = empty;
            for (_, (s, t)) in children {
                src = src.concat(s)?;
                tgt = tgt.concat(t)?;
            }
            Ok((src, tgt))
        }
        Node::Compose { .. } => {
            same_group("compose")?;
            let (outer_src, outer_tgt) = &children[0].1;
            let (inner_src, inner_tgt) = &children[1].1;
            if inner_tgt != outer_src {
                return Err(format!("cannot compose: inner target {inner_tgt} differs from outer source {outer_src}"));
            }
            Ok((inner_src.clone(), outer_tgt.clone()))
        }
        Node::WreathPower(_) => {
            lower_group("wreath_power")?;
            let (child_group, (src, tgt)) = &children[0];
            if child_group.kappa() < 2 {
                return Err("wreath_power needs a child over Z/p^κ with κ ≥ 2".into());
            }
            let r = match src.summands() {
                [(r, 1)] => *r,
                _ => return Err(format!("wreath_power child source must be r·L, got {src}")),
            };
            let s = match tgt.summands() {
                [(s, u)] if *u == p => *s,
                _ => return Err(format!("wreath_power child target must be s·L^{p}, got {tgt}")),
            };
            Ok((SphereType::multiple(group, p * r, 1)?, SphereType::multiple(group, p * s, p)?))
        }
        Node::Inflate(_) => {
            lower_group("inflate")?;
            let (_, (src, tgt)) = &children[0];
            let lift = |st: &SphereType| {
                let pairs: Vec<Summand> = st.summands().iter().map(|&(a, u)| (a, u * p)).collect();
                SphereType::new(group, &pairs)
            };
            Ok((lift(src)?, lift(tgt)?))
        }
    }
}

fn child_path(path: &str, i: usize) -> String {
    format!("{path}.children[{i}]")
}

fn validate_at(cert: &Certificate, path: &str) -> std::result::Result<Typing, CertError> {
    let mut typed = Vec::new();
    for (i, child) in cert.node.children().into_iter().enumerate() {
        let t = validate_at(child, &child_path(path, i))?;
        typed.push((child.group, t));
    }
    let (src, tgt) = infer(cert.group, &cert.node, &typed).map_err(|m| CertError::at(path, m))?;
    for (label, claim, actual) in [("source", &cert.source, &src), ("target", &cert.target, &tgt)] {
        if !SphereType::is_canonical(claim) {
            return Err(CertError::at(path, format!("claimed {label} {claim:?} is not in canonical order")));
        }
        if claim.as_slice() != actual.summands() {
            return Err(CertError::at(
                path,
                format!("claimed {label} {claim:?} but the {} rule gives {:?}", cert.node.kind(), actual.summands()),
            ));
        }
    }
    Ok((src, tgt))
}

/// Re-derives source and target bottom-up and checks every claim.
pub fn validate_certificate(cert: &Certificate) -> std::result::Result<Typing, CertError> {
    validate_at(cert, "$")
}

impl Certificate {
    fn build(group: GroupSpec, node: Node) -> Result<Certificate> {
        let typed: Vec<(GroupSpec, Typing)> = node
            .children()
            .into_iter()
            .map(|c| {
                let s = SphereType::new(c.group, &c.source).map_err(Error::InvalidConstruction)?;
                let t = SphereType::new(c.group, &c.target).map_err(Error::InvalidConstruction)?;
                Ok((c.group, (s, t)))
            })
            .collect::<Result<_>>()?;
        let (s, t) = infer(group, &node, &typed).map_err(Error::InvalidConstruction)?;
        Ok(Certificate { group, node, source: s.summands, target: t.summands })
    }

    pub fn identity(sphere: &SphereType) -> Result<Certificate> {
        Self::build(sphere.group, Node::Identity { sphere: sphere.summands.clone() })
    }

    pub fn inclusion(base: &SphereType, extra: &SphereType) -> Result<Certificate> {
        Self::build(base.group, Node::Inclusion { base: base.summands.clone(), extra: extra.summands.clone() })
    }

    pub fn power(group: GroupSpec, s: u64, t: u64) -> Result<Certificate> {
        Self::build(group, Node::Power { s, t })
    }

    pub fn stolz_meyer(p: u64, d: u64) -> Result<Certificate> {
        Self::build(GroupSpec::new(p, 1)?, Node::StolzMeyer { d })
    }

    pub fn join(children: Vec<Certificate>) -> Result<Certificate> {
        let group = children
            .first()
            .map(|c| c.group)
            .ok_or_else(|| Error::InvalidConstruction("empty join".into()))?;
        Self::build(group, Node::Join(children))
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: Certificate, inner: Certificate) -> Result<Certificate> {
        Self::build(outer.group, Node::Compose { outer: Box::new(outer), inner: Box::new(inner) })
    }

    pub fn wreath_power(child: Certificate) -> Result<Certificate> {
        let group = GroupSpec::new(child.group.p(), i64::from(child.group.k()) + 1)?;
        Self::build(group, Node::WreathPower(Box::new(child)))
    }

    pub fn inflate(child: Certificate) -> Result<Certificate> {
        let group = GroupSpec::new(child.group.p(), i64::from(child.group.k()) + 1)?;
        Self::build(group, Node::Inflate(Box::new(child)))
    }

    pub fn source_type(&self) -> std::result::Result<SphereType, String> {
        SphereType::new(self.group, &self.source)
    }

    pub fn target_type(&self) -> std::result::Result<SphereType, String> {
        SphereType::new(self.group, &self.target)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.node.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

// ---- JSON wire format ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireGroup {
    pub p: u64,
    pub kappa: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireCertificate {
    pub group: WireGroup,
    pub kind: String,
    pub params: Value,
    pub children: Vec<WireCertificate>,
    pub source: Vec<[u64; 2]>,
    pub target: Vec<[u64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdentityParams {
    sphere: Vec<[u64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InclusionParams {
    base: Vec<[u64; 2]>,
    extra: Vec<[u64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerParams {
    s: u64,
    t: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StolzMeyerParams {
    p: u64,
    d: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn to_wire_pairs(v: &[Summand]) -> Vec<[u64; 2]> {
    v.iter().map(|&(a, u)| [a, u]).collect()
}

fn from_wire_pairs(v: &[[u64; 2]]) -> Vec<Summand> {
    v.iter().map(|&[a, u]| (a, u)).collect()
}

impl From<&Certificate> for WireCertificate {
    fn from(c: &Certificate) -> Self {
        let params = match &c.node {
            Node::Identity { sphere } => serde_json::to_value(IdentityParams { sphere: to_wire_pairs(sphere) }),
            Node::Inclusion { base, extra } => serde_json::to_value(InclusionParams {
                base: to_wire_pairs(base),
                extra: to_wire_pairs(extra),
            }),
            Node::Power { s, t } => serde_json::to_value(PowerParams { s: *s, t: *t }),
            Node::StolzMeyer { d } => serde_json::to_value(StolzMeyerParams { p: c.group.p(), d: *d }),
            _ => serde_json::to_value(NoParams {}),
        }
        .expect("plain structs serialize");
        WireCertificate {
            group: WireGroup { p: c.group.p(), kappa: c.group.kappa() },
            kind: c.node.kind().to_string(),
            params,
            children: c.node.children().into_iter().map(WireCertificate::from).collect(),
            source: to_wire_pairs(&c.source),
            target: to_wire_pairs(&c.target),
        }
    }
}

fn params<T: serde::de::DeserializeOwned>(w: &WireCertificate, path: &str) -> std::result::Result<T, CertError> {
    serde_json::from_value(w.params.clone())
        .map_err(|e| CertError::at(path, format!("bad params for {}: {e}", w.kind)))
}

fn arity(w: &WireCertificate, path: &str, ok: bool, expected: &str) -> std::result::Result<(), CertError> {
    if ok {
        Ok(())
    } else {
        Err(CertError::at(path, format!("{} expects {expected} children, got {}", w.kind, w.children.len())))
    }
}

fn from_wire_at(w: &WireCertificate, path: &str) -> std::result::Result<Certificate, CertError> {
    let group = GroupSpec::with_order_exponent(w.group.p, w.group.kappa)
        .map_err(|e| CertError::at(path, format!("bad group: {e}")))?;
    let mut children = w
        .children
        .iter()
        .enumerate()
        .map(|(i, c)| from_wire_at(c, &child_path(path, i)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let n = children.len();
    let node = match w.kind.as_str() {
        "identity" => {
            arity(w, path, n == 0, "0")?;
            let p: IdentityParams = params(w, path)?;
            Node::Identity { sphere: from_wire_pairs(&p.sphere) }
        }
        "inclusion" => {
            arity(w, path, n == 0, "0")?;
            let p: InclusionParams = params(w, path)?;
            Node::Inclusion { base: from_wire_pairs(&p.base), extra: from_wire_pairs(&p.extra) }
        }
        "power" => {
            arity(w, path, n == 0, "0")?;
            let p: PowerParams = params(w, path)?;
            Node::Power { s: p.s, t: p.t }
        }
        "stolz_meyer" => {
            arity(w, path, n == 0, "0")?;
            let p: StolzMeyerParams = params(w, path)?;
            if p.p != group.p() {
                return Err(CertError::at(path, format!("stolz_meyer prime {} differs from group prime {}", p.p, group.p())));
            }
            Node::StolzMeyer { d: p.d }
        }
        "join" => {
            arity(w, path, n >= 1, "at least 1")?;
            let _: NoParams = params(w, path)?;
            Node::Join(children)
        }
        "compose" => {
            arity(w, path, n == 2, "2")?;
            let _: NoParams = params(w, path)?;
            let inner = children.pop().expect("two children");
            let outer = children.pop().expect("two children");
            Node::Compose { outer: Box::new(outer), inner: Box::new(inner) }
        }
        "wreath_power" | "inflate" => {
            arity(w, path, n == 1, "1")?;
            let _: NoParams = params(w, path)?;
            let child = Box::new(children.pop().expect("one child"));
            if w.kind == "inflate" {
                Node::Inflate(child)
            } else {
                Node::WreathPower(child)
            }
        }
        other => return Err(CertError::at(path, format!("unknown node kind {other:?}"))),
    };
    Ok(Certificate { group, node, source: from_wire_pairs(&w.source), target: from_wire_pairs(&w.target) })
}

impl TryFrom<&WireCertificate> for Certificate {
    type Error = CertError;
    fn try_from(w: &WireCertificate) -> std::result::Result<Self, CertError> {
        from_wire_at(w, "$")
    }
}

impl Certificate {
    /// Compact single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&WireCertificate::from(self)).expect("certificate serializes")
    }

    /// Parses without validating; malformed documents are reported at `$`.
    pub fn from_json(text: &str) -> std::result::Result<Certificate, CertError> {
        let wire: WireCertificate =
            serde_json::from_str(text).map_err(|e| CertError::at("$", format!("malformed certificate: {e}")))?;
        Certificate::try_from(&wire)
    }
}

// ---- planner ----

fn invalid(msg: String) -> Error {
    Error::InvalidConstruction(msg)
}

/// A `Z/p^{k+1}`-map `S(p^k(d − 2l)L) → S(p^{k−l} d L^{p^l})`.
pub fn build_prop63(p: u64, k: u32, l: u32, d: u64) -> Result<Certificate> {
    if k < 1 {
        return Err(invalid(format!("need k >= 1, got {k}")));
    }
    if l > k {
        return Err(invalid(format!("need l <= k, got l = {l}, k = {k}")));
    }
    if d <= 2 * u64::from(l) {
        return Err(invalid(format!("need d > 2l, got d = {d}, l = {l}")));
    }
    let group = GroupSpec::new(p, i64::from(k))?;
    match l {
        0 => Certificate::identity(
            &SphereType::multiple(group, group.p_pow(k) * d, 1).map_err(invalid)?,
        ),
        1 => {
            let mut cert = Certificate::stolz_meyer(p, d)?;
            for _ in 1..k {
                cert = Certificate::wreath_power(cert)?;
            }
            Ok(cert)
        }
        _ => {
            let upper = Certificate::inflate(build_prop63(p, k - 1, l - 1, d)?)?;
            let lower = build_prop63(p, k, 1, d - 2 * u64::from(l - 1))?;
            Certificate::compose(upper, lower)
        }
    }
}

/// The constant `c = p^k(k+2)(k+1) − (p^{k+1} − 1)/(p − 1)`, and `0` at `k = 0`.
pub fn worst_case_c(p: u64, k: u32) -> i64 {
    if k == 0 {
        return 0;
    }
    let pk = p.pow(k) as i64;
    let k = i64::from(k);
    pk * (k + 2) * (k + 1) - (pk * p as i64 - 1) / (p as i64 - 1)
}

/// `m_l = n_l p^{k−l} + q_l` at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelPlan {
    pub level: u32,
    pub m: u64,
    pub n: u64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem13Plan {
    pub rep: RepSpec,
    pub levels: Vec<LevelPlan>,
    /// source dimension: the map is `S(n_0 L) → S(V)`
    pub n0: u64,
    pub c_achieved: i64,
    pub certificate: Certificate,
}

/// Splits `m_l` with `q_l` in the lower half of the allowed window.
fn split_level(p: u64, k: u32, l: u32, m: u64) -> LevelPlan {
    let unit = p.pow(k - l);
    let floor = 2 * u64::from(l) * unit;
    if m >= unit * (2 * u64::from(l) + 1) {
        let q = floor + (m - floor) % unit;
        LevelPlan { level: l, m, n: (m - q) / unit, q }
    } else {
        LevelPlan { level: l, m, n: 0, q: m }
    }
}

/// Builds the map `S(n_0 L) → S(V)` level by level.
pub fn plan_theorem13(rep: &RepSpec) -> Result<Theorem13Plan> {
    delta(rep)?;
    let group = rep.group();
    let (p, k) = (group.p(), group.k());
    let target = SphereType::of_rep(rep);

    if k == 0 {
        let maps = rep
            .exponents()
            .iter()
            .map(|&t| Certificate::power(group, 1, t))
            .collect::<Result<Vec<_>>>()?;
        let m = rep.dim() as u64;
        return Ok(Theorem13Plan {
            rep: rep.clone(),
            levels: vec![LevelPlan { level: 0, m, n: m, q: 0 }],
            n0: m,
            c_achieved: 0,
            certificate: Certificate::join(maps)?,
        });
    }

    let levels: Vec<LevelPlan> = rep
        .profile()
        .iter()
        .enumerate()
        .map(|(l, &m)| split_level(p, k, l as u32, m as u64))
        .collect();

    let mut parts = Vec::new();
    let mut leftover: Vec<Summand> = Vec::new();
    for plan in &levels {
        let l = plan.level;
        let pl = group.p_pow(l);
        let exps: Vec<u64> =
            rep.exponents().iter().copied().filter(|&t| valuation(p, t) == l).collect();
        if plan.n == 0 {
            leftover.extend(exps.iter().map(|&t| (1, t)));
            continue;
        }
        let mut cert = build_prop63(p, k, l, plan.n + 2 * u64::from(l))?;
        let reached = p.pow(k - l) * (plan.n + 2 * u64::from(l));
        if reached < plan.m {
            let base = SphereType::multiple(group, reached, pl).map_err(invalid)?;
            let extra = SphereType::multiple(group, plan.m - reached, pl).map_err(invalid)?;
            cert = Certificate::compose(Certificate::inclusion(&base, &extra)?, cert)?;
        }
        if exps.iter().any(|&t| t != pl) {
            let powers = exps
                .iter()
                .map(|&t| Certificate::power(group, pl, t / pl))
                .collect::<Result<Vec<_>>>()?;
            cert = Certificate::compose(Certificate::join(powers)?, cert)?;
        }
        parts.push(cert);
    }
    if parts.is_empty() {
        return Err(Error::NoMapConstructed);
    }
    let mut cert = if parts.len() == 1 { parts.pop().expect("one part") } else { Certificate::join(parts)? };
    if !leftover.is_empty() {
        let base = cert.target_type().map_err(invalid)?;
        let extra = SphereType::new(group, &leftover).map_err(invalid)?;
        cert = Certificate::compose(Certificate::inclusion(&base, &extra)?, cert)?;
    }
    debug_assert_eq!(cert.target_type().ok().as_ref(), Some(&target));

    let n0: u64 = levels.iter().map(|lv| group.p_pow(k) * lv.n).sum();
    Ok(Theorem13Plan {
        rep: rep.clone(),
        levels,
        n0,
        c_achieved: rep.weighted_sum() - n0 as i64,
        certificate: cert,
    })
}

/// Real dimension of the zero-set sphere of the extended map on `S(nL)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroSet {
    pub zero_set_dim: i64,
    pub n0: u64,
}

/// `f([u, t, v]) = t·f_0(v)` on `S(nL) = S((n − n_0)L) * S(n_0 L)` vanishes
/// exactly on `S((n − n_0)L)`.
pub fn theorem13_zero_set(rep: &RepSpec, n: i64) -> Result<ZeroSet> {
    let plan = plan_theorem13(rep)?;
    let n0 = plan.n0 as i64;
    if n <= n0 {
        return Err(Error::BelowConstruction { n, n0 });
    }
    Ok(ZeroSet { zero_set_dim: 2 * (n - n0) - 1, n0: plan.n0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, k: i64) -> GroupSpec {
        GroupSpec::new(p, k).unwrap()
    }

    fn sphere(group: GroupSpec, pairs: &[Summand]) -> SphereType {
        SphereType::new(group, pairs).unwrap()
    }

    #[test]
    fn sphere_canonical_form() {
        let s = sphere(g(3, 1), &[(2, 3), (0, 5), (1, 1), (4, 3)]);
        assert_eq!(s.summands(), &[(1, 1), (6, 3)]);
        assert_eq!(s.dim(), 7);
        assert!(SphereType::new(g(3, 1), &[(1, 9)]).is_err());
        assert!(SphereType::new(g(3, 1), &[(1, 0)]).is_err());
    }

    #[test]
    fn primitive_typing() {
        let s3 = sphere(g(2, 0), &[(3, 1)]);
        let id = Certificate::identity(&s3).unwrap();
        let (src, tgt) = validate_certificate(&id).unwrap();
        assert_eq!((src.clone(), tgt), (s3.clone(), s3));

        let sm = Certificate::stolz_meyer(2, 3).unwrap();
        let (src, tgt) = validate_certificate(&sm).unwrap();
        assert_eq!(src, sphere(g(2, 1), &[(2, 1)]));
        assert_eq!(tgt, sphere(g(2, 1), &[(3, 2)]));

        let w = Certificate::wreath_power(sm).unwrap();
        let (src, tgt) = validate_certificate(&w).unwrap();
        assert_eq!(src, sphere(g(2, 2), &[(4, 1)]));
        assert_eq!(tgt, sphere(g(2, 2), &[(6, 2)]));
    }

    #[test]
    fn primitive_errors() {
        assert!(Certificate::stolz_meyer(2, 2).is_err());
        assert!(Certificate::power(g(2, 1), 2, 2).is_err());
        assert!(Certificate::power(g(2, 1), 4, 1).is_err());
        // wreath power of a level-1 map is not allowed
        let p1 = Certificate::power(g(3, 0), 1, 2).unwrap();
        assert!(Certificate::wreath_power(p1).is_err());
        let a = Certificate::identity(&sphere(g(2, 1), &[(1, 1)])).unwrap();
        let b = Certificate::identity(&sphere(g(2, 1), &[(1, 3)])).unwrap();
        assert!(Certificate::compose(a, b).is_err());
    }

    #[test]
    fn inflate_multiplies_exponents() {
        let inner = Certificate::power(g(3, 0), 1, 2).unwrap();
        let up = Certificate::inflate(inner).unwrap();
        let (src, tgt) = validate_certificate(&up).unwrap();
        assert_eq!(src, sphere(g(3, 1), &[(1, 3)]));
        assert_eq!(tgt, sphere(g(3, 1), &[(1, 6)]));
    }

    #[test]
    fn prop63_examples() {
        let c = build_prop63(2, 1, 1, 3).unwrap();
        assert_eq!((c.source.clone(), c.target.clone()), (vec![(2, 1)], vec![(3, 2)]));
        let c = build_prop63(2, 2, 1, 3).unwrap();
        assert_eq!(c.group.order(), 8);
        assert_eq!((c.source.clone(), c.target.clone()), (vec![(4, 1)], vec![(6, 2)]));
        let c = build_prop63(3, 1, 0, 5).unwrap();
        assert!(matches!(c.node, Node::Identity { .. }));
        assert_eq!((c.source.clone(), c.target.clone()), (vec![(15, 1)], vec![(15, 1)]));
        let c = build_prop63(2, 3, 3, 7).unwrap();
        validate_certificate(&c).unwrap();
        assert_eq!((c.source.clone(), c.target.clone()), (vec![(8, 1)], vec![(7, 8)]));
        assert!(build_prop63(2, 0, 0, 3).is_err());
        assert!(build_prop63(2, 2, 3, 9).is_err());
        assert!(build_prop63(2, 2, 2, 4).is_err());
    }

    #[test]
    fn worst_case_values() {
        assert_eq!(worst_case_c(2, 1), 9);
        assert_eq!(worst_case_c(3, 1), 14);
        assert_eq!(worst_case_c(2, 0), 0);
    }

    #[test]
    fn plan_examples() {
        let rep = RepSpec::from_profile(g(2, 1), &[0, 6]).unwrap();
        let plan = plan_theorem13(&rep).unwrap();
        assert_eq!(plan.levels[1], LevelPlan { level: 1, m: 6, n: 4, q: 2 });
        assert_eq!((plan.n0, plan.c_achieved), (8, 4));
        let (src, tgt) = validate_certificate(&plan.certificate).unwrap();
        assert_eq!(src, sphere(g(2, 1), &[(8, 1)]));
        assert_eq!(tgt, sphere(g(2, 1), &[(6, 2)]));

        let rep = RepSpec::new(g(3, 0), &[1, 2]).unwrap();
        let plan = plan_theorem13(&rep).unwrap();
        assert_eq!((plan.n0, plan.c_achieved), (2, 0));
        let (_, tgt) = validate_certificate(&plan.certificate).unwrap();
        assert_eq!(tgt, SphereType::of_rep(&rep));

        let rep = RepSpec::from_profile(g(2, 1), &[0, 2]).unwrap();
        assert_eq!(plan_theorem13(&rep), Err(Error::NoMapConstructed));
    }

    #[test]
    fn plan_maps_onto_general_units() {
        // exponents 3, 5, 7 are units mod 9 of valuation 0; 3, 6 have valuation 1
        let rep = RepSpec::new(g(3, 1), &[1, 2, 4, 5, 7, 8, 1, 2, 4, 5, 3, 6, 3, 6, 3, 3, 3, 3]).unwrap();
        let plan = plan_theorem13(&rep).unwrap();
        let (src, tgt) = validate_certificate(&plan.certificate).unwrap();
        assert_eq!(tgt, SphereType::of_rep(&rep));
        assert_eq!(src.summands(), &[(plan.n0, 1)]);
    }

    #[test]
    fn zero_set_examples() {
        let rep = RepSpec::from_profile(g(2, 1), &[0, 6]).unwrap();
        assert_eq!(theorem13_zero_set(&rep, 10).unwrap(), ZeroSet { zero_set_dim: 3, n0: 8 });
        assert_eq!(theorem13_zero_set(&rep, 8), Err(Error::BelowConstruction { n: 8, n0: 8 }));
        let rep = RepSpec::new(g(3, 0), &[1, 2]).unwrap();
        assert_eq!(theorem13_zero_set(&rep, 3).unwrap(), ZeroSet { zero_set_dim: 1, n0: 2 });
    }

    #[test]
    fn json_roundtrip_and_paths() {
        let rep = RepSpec::new(g(2, 1), &[1, 1, 1, 2, 2, 2, 2, 2, 2]).unwrap();
        let plan = plan_theorem13(&rep).unwrap();
        let text = plan.certificate.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, plan.certificate);

        let mut wire: WireCertificate = serde_json::from_str(&text).unwrap();
        wire.children[0].target[0][0] += 1;
        let err = validate_certificate(&Certificate::try_from(&wire).unwrap()).unwrap_err();
        assert_eq!(err.path, "$.children[0]");

        assert_eq!(Certificate::from_json("{}").unwrap_err().path, "$");
        let mut wire: WireCertificate = serde_json::from_str(&text).unwrap();
        wire.kind = "teleport".into();
        assert!(Certificate::try_from(&wire).unwrap_err().message.contains("teleport"));
    }

    #[test]
    fn non_canonical_claims_are_rejected() {
        let c = Certificate::identity(&sphere(g(3, 1), &[(1, 1), (1, 2)])).unwrap();
        let mut bad = c.clone();
        bad.source = vec![(1, 2), (1, 1)];
        assert!(validate_certificate(&bad).unwrap_err().message.contains("canonical"));
    }
}
