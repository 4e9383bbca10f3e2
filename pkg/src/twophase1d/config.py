"""Experiment configuration.

Flat key=value text with [section] headers, parsed strictly: unknown
sections or keys are errors, as are malformed lines and bad values, each
reported with the offending line number.  Defaults depend on the experiment
kind and are materialized into the parsed config, so serialize(parse(f))
round-trips value for value.
"""

from dataclasses import dataclass

from .state import ModelParams
from .solver import SchemeConfig


class ConfigError(ValueError):
    """Raised for unparseable or invalid experiment configuration."""


KINDS = ("nonlinear-decay", "linear-spectral", "entropy-audit",
         "dispersion-table")
FAMILIES = ("gaussian", "compact-bump", "random-band-limited",
            "difference-mode")
COMPONENTS = ("rho", "u", "n", "omega")


@dataclass(frozen=True)
class InitialSpec:
    family: str = "compact-bump"
    epsilon: float = 0.01
    width: float = 1.5
    seed: int | None = None
    components: tuple = COMPONENTS


@dataclass(frozen=True)
class FitSpec:
    t_lo: float = 10.0
    t_hi: float = 676.0
    tolerance: float = 0.10


@dataclass(frozen=True)
class SpectralSpec:
    samples: int = 12       # log-spaced evolution times across the fit window
    xi_max: float = 12.0


@dataclass(frozen=True)
class DispersionSpec:
    xi_lo: float = 1e-3
    xi_hi: float = 1e2
    num: int = 50


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    output_dir: str
    model: ModelParams
    L: float
    N: int
    scheme: SchemeConfig
    initial: InitialSpec
    fit: FitSpec
    spectral: SpectralSpec
    dispersion: DispersionSpec


# kind -> overrides of the generic defaults above
_KIND_DEFAULTS = {
    "nonlinear-decay": {
        # the fit window [10, 676] is preasymptotic for |u - omega|: narrow
        # bumps fit steep (-0.85 at width 1.5), wide ones let the weighted
        # suprema grow through the window; width 2 sits inside both limits
        ("initial", "width"): 2.0,
    },
    "linear-spectral": {
        ("initial", "family"): "gaussian",
        ("initial", "width"): 1.0,
        ("fit", "t_lo"): 1e2,
        ("fit", "t_hi"): 1e4,
        ("fit", "tolerance"): 0.03,
    },
    "entropy-audit": {
        ("grid", "L"): 200.0,
        ("grid", "N"): 512,
        ("scheme", "t_end"): 100.0,
        ("initial", "family"): "gaussian",
        ("initial", "epsilon"): 5e-3,
        # wide bump: the balance residual scales like (dx/width)^2, and
        # width 25 buys the budget that brute grid refinement would not
        ("initial", "width"): 25.0,
    },
    "dispersion-table": {},
}

_GENERIC_DEFAULTS = {
    ("experiment", "output_dir"): "out",
    ("model", "a"): 1.0,
    ("model", "gamma"): 1.4,
    ("model", "rho_star"): 1.0,
    ("model", "n_star"): 1.0,
    ("grid", "L"): 2000.0,
    ("grid", "N"): 2 ** 14,
    ("scheme", "cfl"): 0.9,
    ("scheme", "reconstruction"): "muscl-minmod",
    ("scheme", "t_end"): 676.0,
    ("scheme", "output_every"): 50,
    ("scheme", "fixed_dt"): None,
    ("initial", "family"): "compact-bump",
    ("initial", "epsilon"): 0.01,
    ("initial", "width"): 1.5,
    ("initial", "seed"): None,
    ("initial", "components"): ",".join(COMPONENTS),
    ("fit", "t_lo"): 10.0,
    ("fit", "t_hi"): 676.0,
    ("fit", "tolerance"): 0.10,
    ("spectral", "samples"): 12,
    ("spectral", "xi_max"): 12.0,
    ("dispersion", "xi_lo"): 1e-3,
    ("dispersion", "xi_hi"): 1e2,
    ("dispersion", "num"): 50,
}

# key -> converter; "optional" keys accept an empty value as None
_INT_KEYS = {("grid", "N"), ("scheme", "output_every"), ("initial", "seed"),
             ("spectral", "samples"), ("dispersion", "num")}
_STR_KEYS = {("experiment", "kind"), ("experiment", "output_dir"),
             ("scheme", "reconstruction"), ("initial", "family"),
             ("initial", "components")}
_OPTIONAL_KEYS = {("initial", "seed"), ("scheme", "fixed_dt")}
_ALL_KEYS = set(_GENERIC_DEFAULTS) | {("experiment", "kind")}


def _convert(sec, key, raw, lineno):
    where = f"line {lineno}: [{sec}] {key}"
    if raw == "":
        if (sec, key) in _OPTIONAL_KEYS:
            return None
        raise ConfigError(f"{where}: empty value")
    if (sec, key) in _STR_KEYS:
        return raw
    kind = int if (sec, key) in _INT_KEYS else float
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected {kind.__name__}, "
                          f"got {raw!r}") from None


def _scan(text):
    """Yield (lineno, section, key, rawvalue) triples; structural errors here."""
    section = None
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in {s for s, _ in _ALL_KEYS}:
                raise ConfigError(f"line {lineno}: unknown section "
                                  f"[{section}]")
            continue
        if section is None:
            raise ConfigError(f"line {lineno}: key before any [section] "
                              f"header: {stripped!r}")
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, "
                              f"got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if (section, key) not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in "
                              f"[{section}]")
        if (section, key) in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in "
                              f"[{section}]")
        seen.add((section, key))
        yield lineno, section, key, raw


def parse_config_text(text):
    values = {}
    for lineno, sec, key, raw in _scan(text):
        values[(sec, key)] = _convert(sec, key, raw, lineno)

    if ("experiment", "kind") not in values:
        raise ConfigError("missing required key: [experiment] kind")
    kind = values[("experiment", "kind")]
    if kind not in KINDS:
        raise ConfigError(f"[experiment] kind must be one of "
                          f"{', '.join(KINDS)}; got {kind!r}")

    eff = dict(_GENERIC_DEFAULTS)
    eff.update(_KIND_DEFAULTS[kind])
    eff.update(values)

    # the audit refines dt by halving, so its default must be a literal value
    if kind == "entropy-audit" and eff[("scheme", "fixed_dt")] is None:
        dx = eff[("grid", "L")] / eff[("grid", "N")]
        eff[("scheme", "fixed_dt")] = 0.1 * dx * dx

    return _build(kind, eff)


def _build(kind, eff):
    def g(sec, key):
        return eff[(sec, key)]

    def check(cond, msg):
        if not cond:
            raise ConfigError(msg)

    check(g("model", "a") > 0, "model.a must be positive")
    check(g("model", "gamma") >= 1, "model.gamma must be >= 1")
    check(g("model", "rho_star") > 0, "model.rho_star must be positive")
    check(g("model", "n_star") > 0, "model.n_star must be positive")
    model = ModelParams(a=g("model", "a"), gamma=g("model", "gamma"),
                        rho_star=g("model", "rho_star"),
                        n_star=g("model", "n_star"))

    L, N = g("grid", "L"), g("grid", "N")
    check(L > 0, f"grid.L must be positive (got {L})")
    check(N > 0, f"grid.N must be a positive integer (got {N})")

    try:
        scheme = SchemeConfig(cfl=g("scheme", "cfl"),
                              reconstruction=g("scheme", "reconstruction"),
                              t_end=g("scheme", "t_end"),
                              output_every=g("scheme", "output_every"),
                              fixed_dt=g("scheme", "fixed_dt"))
    except ValueError as e:
        raise ConfigError(f"[scheme]: {e}") from None

    family = g("initial", "family")
    check(family in FAMILIES,
          f"initial.family must be one of {', '.join(FAMILIES)}; "
          f"got {family!r}")
    eps = g("initial", "epsilon")
    check(eps >= 0, f"initial.epsilon must be nonnegative (got {eps})")
    check(g("initial", "width") > 0, "initial.width must be positive")
    seed = g("initial", "seed")
    if family == "random-band-limited":
        check(seed is not None,
              "initial.seed is required for family random-band-limited")
    comps = tuple(c.strip() for c in g("initial", "components").split(","))
    check(all(c in COMPONENTS for c in comps) and len(comps) > 0,
          f"initial.components must be a comma list drawn from "
          f"{', '.join(COMPONENTS)}")
    check(len(set(comps)) == len(comps),
          "initial.components has duplicates")
    initial = InitialSpec(family=family, epsilon=eps,
                          width=g("initial", "width"), seed=seed,
                          components=comps)

    t_lo, t_hi = g("fit", "t_lo"), g("fit", "t_hi")
    check(t_lo >= 0 and t_hi > t_lo,
          f"fit window must satisfy 0 <= t_lo < t_hi (got {t_lo}, {t_hi})")
    check(g("fit", "tolerance") > 0, "fit.tolerance must be positive")
    fit = FitSpec(t_lo=t_lo, t_hi=t_hi, tolerance=g("fit", "tolerance"))

    check(g("spectral", "samples") >= 8,
          "spectral.samples must be at least 8 (the fit needs them)")
    check(g("spectral", "xi_max") > 0, "spectral.xi_max must be positive")
    spectral = SpectralSpec(samples=g("spectral", "samples"),
                            xi_max=g("spectral", "xi_max"))

    xi_lo, xi_hi = g("dispersion", "xi_lo"), g("dispersion", "xi_hi")
    check(0 < xi_lo < xi_hi,
          f"dispersion range must satisfy 0 < xi_lo < xi_hi "
          f"(got {xi_lo}, {xi_hi})")
    check(g("dispersion", "num") >= 2, "dispersion.num must be at least 2")
    dispersion = DispersionSpec(xi_lo=xi_lo, xi_hi=xi_hi,
                                num=g("dispersion", "num"))

    return ExperimentConfig(kind=kind, output_dir=g("experiment",
                                                    "output_dir"),
                            model=model, L=L, N=N, scheme=scheme,
                            initial=initial, fit=fit, spectral=spectral,
                            dispersion=dispersion)


def parse_config(path):
    with open(path) as fh:
        return parse_config_text(fh.read())


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize(cfg: ExperimentConfig) -> str:
    """Render every effective value; parse(serialize(cfg)) == cfg."""
    m, s, i = cfg.model, cfg.scheme, cfg.initial
    sections = [
        ("experiment", [("kind", cfg.kind), ("output_dir", cfg.output_dir)]),
        ("model", [("a", m.a), ("gamma", m.gamma), ("rho_star", m.rho_star),
                   ("n_star", m.n_star)]),
        ("grid", [("L", cfg.L), ("N", cfg.N)]),
        ("scheme", [("cfl", s.cfl), ("reconstruction", s.reconstruction),
                    ("t_end", s.t_end), ("output_every", s.output_every),
                    ("fixed_dt", s.fixed_dt)]),
        ("initial", [("family", i.family), ("epsilon", i.epsilon),
                     ("width", i.width), ("seed", i.seed),
                     ("components", ",".join(i.components))]),
        ("fit", [("t_lo", cfg.fit.t_lo), ("t_hi", cfg.fit.t_hi),
                 ("tolerance", cfg.fit.tolerance)]),
        ("spectral", [("samples", cfg.spectral.samples),
                      ("xi_max", cfg.spectral.xi_max)]),
        ("dispersion", [("xi_lo", cfg.dispersion.xi_lo),
                        ("xi_hi", cfg.dispersion.xi_hi),
                        ("num", cfg.dispersion.num)]),
    ]
    lines = []
    for name, pairs in sections:
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {_fmt(v)}" for k, v in pairs)
        lines.append("")
    return "\n".join(lines)


def save_config(cfg, path):
    with open(path, "w") as fh:
        fh.write(serialize(cfg))


def config_as_dict(cfg):
    """Nested plain-type echo of the effective configuration."""
    m, s, i = cfg.model, cfg.scheme, cfg.initial
    return {
        "experiment": {"kind": cfg.kind, "output_dir": cfg.output_dir},
        "model": {"a": m.a, "gamma": m.gamma, "rho_star": m.rho_star,
                  "n_star": m.n_star},
        "grid": {"L": cfg.L, "N": cfg.N},
        "scheme": {"cfl": s.cfl, "reconstruction": s.reconstruction,
                   "t_end": s.t_end, "output_every": s.output_every,
                   "fixed_dt": s.fixed_dt},
        "initial": {"family": i.family, "epsilon": i.epsilon,
                    "width": i.width, "seed": i.seed,
                    "components": list(i.components)},
        "fit": {"t_lo": cfg.fit.t_lo, "t_hi": cfg.fit.t_hi,
                "tolerance": cfg.fit.tolerance},
        "spectral": {"samples": cfg.spectral.samples,
                     "xi_max": cfg.spectral.xi_max},
        "dispersion": {"xi_lo": cfg.dispersion.xi_lo,
                       "xi_hi": cfg.dispersion.xi_hi,
                       "num": cfg.dispersion.num},
    }
