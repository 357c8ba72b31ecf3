"""Term rewriting with a sequential inner-most engine and a bulk-synchronous sweep engine."""
from .compiler import DispatchTable, compile_system, dump_dispatch, try_rules
from .corpora import GenSpec, generate, generate_system
from .parser import ParseError, TRSError, load_file, load_system, parse, print_system, resolve
from .store import TermStore, extract, load
from .sweep import SweepEngine, SweepTrace
from .terms import (App, RewriteSystem, Rule, Signature, SymbolInfo, Term, Var,
                    apply_substitution, format_term, head_symbol, match_pattern,
                    term_equal, validate_rule, variables_of)

__version__ = "0.1.0"
