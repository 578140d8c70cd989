"""
Command Registry - Dispatch of chatelet subcommands to their handlers
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Dict, Optional, TextIO

from arith import parse_rational
from certify import (
    Certificate,
    digest,
    load_certificate,
    make_certificate,
    parse_document,
    run_reference_examples,
    verdict_hp,
    verdict_wa,
    verify_certificate,
)
from chatelet_local import SearchBounds, SurfaceKind, classify_place, format_invariant, invariant_set, outcome_for
from config import Config
from construct import build
from decorators import PathManager, handle_chatelet_errors, with_loading_indicator
from errors import ParseError, c_EXIT_MISMATCH, c_EXIT_OK, c_EXIT_VALIDATION
from hilbert import hilbert_symbol
from places_fields import NumberField, Place, parse_places
from ui_utils import UIUtils


def _dump(document) -> str:
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read certificate {path}: {e}") from e


class CommandRegistry:
    """Registry for the chatelet subcommands"""

    def __init__(self, ui: UIUtils, config: Config, out: Optional[TextIO] = None):
        self.ui = ui
        self.config = config
        self.out = out or sys.stdout

        self.commands: Dict[str, Callable[[argparse.Namespace], int]] = {
            "hilbert": self.handle_hilbert,
            "construct": self.handle_construct,
            "invariants": self.handle_invariants,
            "verdict": self.handle_verdict,
            "verify": self.handle_verify,
            "verify-paper-examples": self.handle_verify_paper_examples,
        }

    def execute(self, command: str, args: argparse.Namespace) -> int:
        """
        Run a registered command

        Args:
            command: Subcommand name
            args: Parsed arguments

        Returns:
            Process exit code
        """
        handler = self.commands.get(command)
        if handler is None:
            self.ui.status(self.ui.error(f"Unknown command: {command}"))
            return c_EXIT_VALIDATION
        return handle_chatelet_errors(command, self.ui)(handler)(args)

    def emit(self, text: str) -> None:
        print(text, file=self.out)

    def search_bounds(self) -> SearchBounds:
        return SearchBounds(**self.config.search_options())

    def _load(self, path: str) -> Certificate:
        return load_certificate(
            _read_text(path),
            search_count=self.config.nonsquare_search_count(),
            prime_bound=self.config.prime_bound(),
        )

    def handle_hilbert(self, args: argparse.Namespace) -> int:
        """Print (a, b)_v as +1 or -1"""
        symbol = hilbert_symbol(parse_rational(args.a), parse_rational(args.b), Place.parse(args.place))
        self.emit("+1" if symbol == 1 else "-1")
        return c_EXIT_OK

    def handle_construct(self, args: argparse.Namespace) -> int:
        """Build parameters for the requested kind and print the certificate"""
        kind = SurfaceKind.parse(args.kind)
        L = NumberField.parse(args.minpoly)
        S = parse_places(args.S)
        sample_bound = args.sample_bound if args.sample_bound is not None else self.config.sample_prime_bound()
        pins = {
            "a": parse_rational(args.a) if args.a is not None else None,
            "v1": args.v1,
            "v2": args.v2,
        }

        @with_loading_indicator("Constructing", self.ui)
        def run() -> Certificate:
            V, params = build(
                kind,
                L,
                S,
                search_count=self.config.nonsquare_search_count(),
                **pins,
                **self.config.builder_options(),
            )
            return make_certificate(
                V,
                kind,
                params,
                L,
                bounds=self.search_bounds(),
                sample_prime_bound=sample_bound,
                search_count=self.config.nonsquare_search_count(),
                prime_bound=self.config.prime_bound(),
            )

        cert = run()
        payload = cert.serialize()
        if args.out:
            target = Path(args.out)
            target.write_bytes(payload)
            PathManager.get_digest_file(target).write_text(digest(cert.to_json()) + "\n", encoding="utf-8")
            self.ui.status(self.ui.success(f"Certificate written to {target}"))
        else:
            self.emit(payload.decode("utf-8"))
        params = cert.params
        self.ui.status(
            self.ui.info(f"{kind.value}: a = {params.a}, b = {params.b}, c = {params.c}, v1 = {params.v1}, v2 = {params.v2}")
        )
        return c_EXIT_OK

    def handle_invariants(self, args: argparse.Namespace) -> int:
        """Search local points at one place of a verified certificate"""
        cert = self._load(args.cert)
        v = Place.parse(args.place)
        params = cert.params
        place_class = classify_place(v, params.a, params.b, params.S, params.kind)
        outcome = outcome_for(cert.rules, place_class)
        search = invariant_set(cert.surface, v, self.search_bounds())
        document = search.to_json()
        document["class"] = place_class.value
        document["case_id"] = outcome.case_id if outcome is not None else None
        document["claim"] = [format_invariant(x) for x in sorted(outcome.invariant_claim)] if outcome else []
        self.emit(_dump(document))
        return c_EXIT_OK

    def handle_verdict(self, args: argparse.Namespace) -> int:
        """Hasse principle verdict for v2 certificates, weak approximation for v1"""
        cert = self._load(args.cert)
        field = NumberField.parse(args.subfield) if args.subfield else None
        if cert.kind is SurfaceKind.V2:
            if args.off:
                self.ui.status(self.ui.warning("--off only applies to v1 certificates; ignored"))
            verdict = verdict_hp(cert, field)
        else:
            verdict = verdict_wa(cert, field, parse_places(args.off or ""))
        self.emit(_dump(verdict.to_json()))
        return c_EXIT_OK

    def handle_verify(self, args: argparse.Namespace) -> int:
        """Recompute a certificate from its params and compare"""
        text = _read_text(args.cert)
        document = parse_document(text)
        report = verify_certificate(
            document,
            search_count=self.config.nonsquare_search_count(),
            prime_bound=self.config.prime_bound(),
        )
        result = report.to_json()
        sidecar = PathManager.get_digest_file(Path(args.cert))
        if sidecar.exists():
            recorded = sidecar.read_text(encoding="utf-8").split()
            matches = bool(recorded) and recorded[0] == digest(document)
            result["digest"] = "match" if matches else "mismatch"
            if not matches:
                result["ok"] = False
        self.emit(_dump(result))
        if result["ok"]:
            self.ui.status(self.ui.success("Certificate verifies"))
            return c_EXIT_OK
        for line in result["mismatches"][:10]:
            self.ui.status(self.ui.error(line))
        if result.get("digest") == "mismatch":
            self.ui.status(self.ui.error(f"digest in {sidecar} does not match the document"))
        return c_EXIT_MISMATCH

    def handle_verify_paper_examples(self, args: argparse.Namespace) -> int:
        """Rebuild both worked examples end to end and report every check"""

        @with_loading_indicator("Rebuilding worked examples", self.ui)
        def run():
            return run_reference_examples(
                bounds=self.search_bounds(),
                sample_prime_bound=self.config.sample_prime_bound(),
                **self.config.builder_options(),
            )

        results = run()
        summary = []
        for result in results:
            self.ui.status(self.ui.heading(result.example.name))
            for check in result.report.checks:
                line = check.condition + (f" ({check.detail})" if check.detail and not check.passed else "")
                self.ui.status(self.ui.success(line) if check.passed else self.ui.error(line))
            summary.append(
                {
                    "name": result.example.name,
                    "passed": result.passed,
                    "failures": result.report.failed_conditions(),
                }
            )
        self.emit(_dump(summary))
        return c_EXIT_OK if all(r.passed for r in results) else c_EXIT_VALIDATION
