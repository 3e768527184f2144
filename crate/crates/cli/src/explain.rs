//! Short descriptions of report fields.

const ANCHORS: &[(&str, &str)] = &[
    (
        "entropy.ratio",
        "ln(N)/|F| where N is the least number of sets of the pulled-back cover U^F = join of s^-1 U over s in F \
         needed to cover the system. Naive entropy is the infimum over finite F, so every row is an upper bound.",
    ),
    (
        "entropy.n",
        "Minimal subcover count of U^F. n_low counts only certified patterns, n_high every pattern not refuted; \
         they agree on systems with an exact realizability engine.",
    ),
    (
        "density.ratio",
        "|J|/|F| for the largest independence set J inside the region F, maximized over the tuples of the family. \
         J is an independence set for (A_1..A_k) when every choice w: J -> [k] leaves the intersection of \
         s^-1 A_w(s) over s in J nonempty.",
    ),
    (
        "density.infimum",
        "Least density ratio over the tested regions. Independence density quantifies over every finite region, \
         so this is an upper bound.",
    ),
    (
        "density.entropy_lower",
        "q ln k for the density estimate q and the shortest tuple length k. It is a lower bound on naive entropy \
         only if q is a true density, hence labeled evidence.",
    ),
    (
        "double.eta",
        "|J_s n J_t| / |F'| for the pair {s,t} of the separated set E chosen by the doubling step, where \
         J_t = t^-1 (J n t F'). The step checks eta |E|^2 >= 1 and the companion integer inequalities.",
    ),
    (
        "double.checks",
        "Integer inequalities verified per doubling stage: q|E| >= 2, |F'||E|^2 >= |F|, sum |J_t| >= 2|F'|, \
         |I||E|^2 >= |F'|, |I||E|^4 >= |F|, and sI, tI disjoint inside J.",
    ),
    (
        "km.threshold",
        "Shattering threshold sum_{i<t} C(n,i)(k-1)^(n-i): a trace set S of maps [n] -> [k] larger than this is \
         claimed to fully shatter some t-set. The closed form is externally sourced and checked by brute force; \
         the binomial variant with exponent i is available and fails for k = 3.",
    ),
    (
        "comb1.min_ratio",
        "Smallest shattered-set ratio |J|/n among trace sets with N_S >= k^(bn), tested exactly as \
         N_S^q >= k^(pn) for b = p/q. Exact in exhaustive modes, evidence when sampled.",
    ),
    ("ns.count", "N_S: least number of sets W_i = {maps avoiding i(z) at every z}, i in [k]^n, covering S."),
    ("ns.shatter", "Largest J of coordinates with S restricted to J containing every map J -> [k]."),
    (
        "chaos.properties",
        "Checks of one tower step: inclusions u A_{i,j} inside A_gamma for every gamma, translates avoiding the \
         conjugated exclusion set, pairwise disjoint entries, diameters at most 2^-(m+1) in the recorded frames \
         after the split, and entries refining their parents.",
    ),
    (
        "scenario.no-orbit-ie",
        "Largest independence set of ({x_s = 0}, {x_s = 1}) in {s a^k : k <= K} on X_{a-1}. Configurations are \
         constant on a-cosets, so at most one point of the coset can be used: the answer is exactly 1.",
    ),
    (
        "scenario.family-vs-single",
        "Ratios on {s a^k : k <= K} of the value pair at s alone (1/K) and of the family of value pairs at base \
         points in distinct a-cosets (1).",
    ),
    (
        "scenario.xa1-entropy",
        "Per ball: upper estimates from the value partition and the family cover, the family's independence ratio \
         and the lower bound it yields, plus the full-shift row for comparison (exactly ln m).",
    ),
];

pub fn anchors() -> impl Iterator<Item = &'static str> {
    ANCHORS.iter().map(|(a, _)| *a)
}

/// The description of `anchor`, or the list of known anchors.
pub fn explain(anchor: &str) -> Result<&'static str, String> {
    ANCHORS
        .iter()
        .find(|(a, _)| *a == anchor)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let known: Vec<&str> = anchors().collect();
            format!(
                "unknown anchor {anchor:?}; known anchors: {}",
                known.join(", ")
            )
        })
}
