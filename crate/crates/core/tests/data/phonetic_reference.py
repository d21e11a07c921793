"""Reference encoders for the methods without a Rust reference crate.

Writes phonetic_reference.tsv (name, method, code) for every name in surnames.txt.
Run from this directory: python3 phonetic_reference.py
"""

VOWELS = "AEIOU"
CONSONANTS = "BCDFGHJKLMNPQRSTVWXYZ"


def collapse(s):
    out = []
    for ch in s:
        if not out or out[-1] != ch:
            out.append(ch)
    return "".join(out)


# Phonix: Gadd's substitution table, then digit coding.

def start_repl(w, src, tar, post=None):
    if post:
        for j in post:
            if w.startswith(src + j):
                return tar + w[len(src):]
        return w
    return tar + w[len(src):] if w.startswith(src) else w


def end_repl(w, src, tar, pre=None):
    if pre:
        for i in pre:
            if w.endswith(i + src):
                return w[: -len(src)] + tar
        return w
    return w[: -len(src)] + tar if w.endswith(src) else w


def all_repl(w, src, tar, pre=None, post=None):
    if pre or post:
        for i in sorted(pre or [""]):
            for j in sorted(post or [""]):
                w = w.replace(i + src + j, i + tar + j)
        return w
    return w.replace(src, tar)


def mid_repl(w, src, tar, pre=None, post=None):
    if len(w) < 2:
        return w
    if pre or post:
        if not pre:
            return w[0] + all_repl(w[1:], src, tar, pre, post)
        if not post:
            return all_repl(w[:-1], src, tar, pre, post) + w[-1]
        return all_repl(w, src, tar, pre, post)
    return w[0] + all_repl(w[1:-1], src, tar) + w[-1]


V, C = VOWELS, CONSONANTS
PHONIX_RULES = [
    (all_repl, "DG", "G"), (all_repl, "CO", "KO"), (all_repl, "CA", "KA"),
    (all_repl, "CU", "KU"), (all_repl, "CY", "SI"), (all_repl, "CI", "SI"),
    (all_repl, "CE", "SE"), (start_repl, "CL", "KL", V), (all_repl, "CK", "K"),
    (end_repl, "GC", "K"), (end_repl, "JC", "K"), (start_repl, "CHR", "KR", V),
    (start_repl, "CR", "KR", V), (start_repl, "WR", "R"), (all_repl, "NC", "NK"),
    (all_repl, "CT", "KT"), (all_repl, "PH", "F"), (all_repl, "AA", "AR"),
    (all_repl, "SCH", "SH"), (all_repl, "BTL", "TL"), (all_repl, "GHT", "T"),
    (all_repl, "AUGH", "ARF"), (mid_repl, "LJ", "LD", V, V), (all_repl, "LOUGH", "LOW"),
    (start_repl, "Q", "KW"), (start_repl, "KN", "N"), (end_repl, "GN", "N"),
    (all_repl, "GHN", "N"), (end_repl, "GNE", "N"), (all_repl, "GHNE", "NE"),
    (end_repl, "GNES", "NS"), (start_repl, "GN", "N"), (mid_repl, "GN", "N", None, C),
    (end_repl, "GN", "N"), (start_repl, "PS", "S"), (start_repl, "PT", "T"),
    (start_repl, "CZ", "C"), (mid_repl, "WZ", "Z", V), (mid_repl, "CZ", "CH"),
    (all_repl, "LZ", "LSH"), (all_repl, "RZ", "RSH"), (mid_repl, "Z", "S", None, V),
    (all_repl, "ZZ", "TS"), (mid_repl, "Z", "TS", C), (all_repl, "HROUG", "REW"),
    (all_repl, "OUGH", "OF"), (mid_repl, "Q", "KW", V, V), (mid_repl, "J", "Y", V, V),
    (start_repl, "YJ", "Y", V), (start_repl, "GH", "G"), (end_repl, "GH", "E", V),
    (start_repl, "CY", "S"), (all_repl, "NX", "NKS"), (start_repl, "PF", "F"),
    (end_repl, "DT", "T"), (end_repl, "TL", "TIL"), (end_repl, "DL", "DIL"),
    (all_repl, "YTH", "ITH"), (start_repl, "TJ", "CH", V), (start_repl, "TSJ", "CH", V),
    (start_repl, "TS", "T", V), (all_repl, "TCH", "CH"), (mid_repl, "WSK", "VSKIE", V),
    (end_repl, "WSK", "VSKIE", V), (start_repl, "MN", "N", V), (start_repl, "PN", "N", V),
    (mid_repl, "STL", "SL", V), (end_repl, "STL", "SL", V), (end_repl, "TNT", "ENT"),
    (end_repl, "EAUX", "OH"), (all_repl, "EXCI", "ECS"), (all_repl, "X", "ECS"),
    (end_repl, "NED", "ND"), (all_repl, "JR", "DR"), (end_repl, "EE", "EA"),
    (all_repl, "ZS", "S"), (mid_repl, "R", "AH", V, C), (end_repl, "R", "AH", V),
    (mid_repl, "HR", "AH", V, C), (end_repl, "HR", "AH", V), (end_repl, "HR", "AH", V),
    (end_repl, "RE", "AR"), (end_repl, "R", "AH", V), (all_repl, "LLE", "LE"),
    (end_repl, "LE", "ILE", C), (end_repl, "LES", "ILES", C), (end_repl, "E", ""),
    (end_repl, "ES", "S"), (end_repl, "SS", "AS", V), (end_repl, "MB", "M", V),
    (all_repl, "MPTS", "MPS"), (all_repl, "MPS", "MS"), (all_repl, "MPT", "MT"),
]
PHONIX_DIGITS = dict(zip("ABCDEFGHIJKLMNOPQRSTUVWXYZ", "01230720022455012683070808"))


def phonix(name):
    w = name.upper()
    for f, *args in PHONIX_RULES:
        w = f(w, *args)
    if not w:
        w = name.upper()[0]
    head = "V" if w[0] in "AEIOUY" else w[0]
    code = head + collapse("".join(PHONIX_DIGITS[c] for c in w[1:])).replace("0", "")
    return (code + "000")[:4]


# Fuzzy Soundex (Holmes and McCabe).

FUZZY_DIGITS = dict(zip("ABCDEFGHIJKLMNOPQRSTUVWXYZ", "0193017-07745501769301-7-9"))
FUZZY_QGRAMS = [
    ("CA", "KA"), ("CC", "KK"), ("CK", "KK"), ("CE", "SE"), ("CHL", "KL"), ("CL", "KL"),
    ("CHR", "KR"), ("CR", "KR"), ("CI", "SI"), ("CO", "KO"), ("CU", "KU"), ("CY", "SY"),
    ("DG", "GG"), ("GH", "HH"), ("MAC", "MK"), ("MC", "MK"), ("NST", "NSS"), ("PF", "FF"),
    ("PH", "FF"), ("SCH", "SSS"), ("TIO", "SIO"), ("TIA", "SIO"), ("TCH", "CHH"),
]


def fuzzy_soundex(name):
    w = name.upper()
    if w[:2] in ("CS", "CZ", "TS", "TZ"):
        w = "SS" + w[2:]
    elif w[:2] == "GN":
        w = "NN" + w[2:]
    elif w[:2] in ("HR", "WR"):
        w = "RR" + w[2:]
    elif w[:2] == "HW":
        w = "WW" + w[2:]
    elif w[:2] in ("KN", "NG"):
        w = "NN" + w[2:]
    if w[-2:] == "CH":
        w = w[:-2] + "KK"
    elif w[-2:] == "NT":
        w = w[:-2] + "TT"
    elif w[-2:] == "RT":
        w = w[:-2] + "RR"
    elif w[-3:] == "RDT":
        w = w[:-3] + "RR"
    for a, b in FUZZY_QGRAMS:
        w = w.replace(a, b)
    digits = collapse("".join(FUZZY_DIGITS[c] for c in w).replace("-", ""))
    code = w[0] + digits if w[0] in "HWY" else w[0] + digits[1:]
    return (code.replace("0", "") + "000")[:4]


# Modified Soundex: census Soundex collapsing over the refined digit classes.

REFINED_DIGITS = dict(zip("ABCDEFGHIJKLMNOPQRSTUVWXYZ", "01360240043788015936020505"))


def modified_soundex(name):
    w = name.upper()
    code = w[0]
    prev = REFINED_DIGITS[w[0]]
    for c in w[1:]:
        if c in "HW":
            continue
        d = REFINED_DIGITS[c]
        if d != "0" and d != prev:
            code += d
        prev = d
    return (code + "000")[:4]


if __name__ == "__main__":
    with open("surnames.txt") as f:
        names = [line.strip() for line in f if line.strip()]
    with open("phonetic_reference.tsv", "w") as out:
        for n in names:
            for method, fn in (("phonix", phonix), ("fuzzy_soundex", fuzzy_soundex), ("modified_soundex", modified_soundex)):
                out.write(f"{n}\t{method}\t{fn(n).lower()}\n")
