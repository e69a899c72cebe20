"""Independent reference implementations used as test oracles.

Nothing here imports the matching or scoring code under test.  The toy
inputs fed to these oracles use tokens that normalization leaves
untouched (lowercase, not stop words, no trailing "s"), so the oracle can
split titles on whitespace.
"""

WEIGHTS = {"chapter": 16.0, "section": 8.0, "subsection": 4.0, "topic": 2.0}
PROXIMITY = 2.0


def all_windows(tokens):
    """Every contiguous window of every length, no pruning."""
    return {tuple(tokens[i:j]) for i in range(len(tokens)) for j in range(i + 1, len(tokens) + 1)}


def contains_contiguous(haystack, needle):
    n = len(needle)
    return any(tuple(haystack[i:i + n]) == tuple(needle) for i in range(len(haystack) - n + 1))


def brute_match(target, reference):
    """(unigrams, ngrams, full) by exhaustive enumeration."""
    found = {w for w in all_windows(target) if contains_contiguous(reference, w)}
    unigrams = {w[0] for w in found if len(w) == 1}
    ngrams = {w for w in found if len(w) >= 2}
    full = bool(target) and set(target) == set(reference)
    return unigrams, ngrams, full


def brute_contribution(target, reference, weight, proximity=PROXIMITY, combination=True):
    unigrams, ngrams, full = brute_match(target, reference)
    if not unigrams:
        return 0.0
    if full:
        return weight * proximity
    if not combination:
        return 0.0
    size = len(target)
    pairs = size * (size - 1) // 2
    return weight * len(unigrams) / size + (weight * len(ngrams) / pairs if ngrams else 0.0)


def brute_chapter_score(target_title, chapter, weights=WEIGHTS, proximity=PROXIMITY):
    """Score a whitespace-tokenized target against a plain-dict toy chapter.

    ``chapter`` = {"title": str, "sections": [{"title": str,
    "subsections": [{"title": str, "keywords": [str]}]}]}.  Sections with
    no subsections contribute only their own title.
    """
    target = target_title.split()
    if not target:
        return 0.0
    nodes = [(chapter["title"], "chapter")]
    for sec in chapter["sections"]:
        nodes.append((sec["title"], "section"))
        for sub in sec.get("subsections", []):
            nodes.append((sub["title"], "subsection"))
            nodes.extend((kw, "topic") for kw in sub.get("keywords", []))
    total = 0.0
    for text, level in nodes:
        total += brute_contribution(target, text.split(), weights[level], proximity)
    return total


def brute_confusion(predicted, truth):
    """(tp, fp, outlier) by walking the two label lists side by side."""
    tp = fp = out = 0
    for tid, pred in predicted.items():
        if pred is None:
            out += 1
        elif pred == truth[tid]:
            tp += 1
        else:
            fp += 1
    return tp, fp, out


def brute_argmax(totals):
    """Lowest 1-based index holding the maximum, or None when all are zero."""
    best = max(totals)
    if best <= 0:
        return None
    return min(i for i, t in enumerate(totals, start=1) if t == best)
