from dataclasses import dataclass, replace

DEFAULT_WORD_CAP = 10**6


@dataclass(frozen=True)
class Caps:
    """Search limits shared by the bounded procedures.

    ``word_cap`` bounds every materialized (raw or tightened) word.
    ``verdict_cap`` bounds the raw words scanned by the hard-splitting
    k-loop; past it the loop stops and reports the last iterate reached.
    """

    word_cap: int = DEFAULT_WORD_CAP
    verdict_cap: int = 2**15
    horizon: int = 8
    kmax: int = 8
    nielsen_max_len: int = 12
    exp_search_len: int = 10
    depth: int = 4
    max_paths: int = 200_000
    max_power: int = 16

    def with_(self, **kw) -> "Caps":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT_CAPS = Caps()
