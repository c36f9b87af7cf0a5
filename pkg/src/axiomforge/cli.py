"""Command line front door.

Subcommands cover the batch side of the tool: checking ontology files,
inspecting the registry as a tree, replaying operation scripts into axiom
text, assembling capabilities from replayed sections, and serving the HTTP
API.  Results go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import codegen, scripts
from .codegen import CapabilitySkeleton, NEGATION_FLAVORS, RenderOptions
from .errors import AxiomForgeError, BadDocument
from .graph import AxiomModel
from .ontology import OntologyRegistry, OntologyWarehouse, norm_iri
from .parser import parse_document

USAGE_ERROR = 2
DOMAIN_ERROR = 1

TREE_LETTERS = {
    "concept": "C",
    "attribute": "@",
    "instance": "I",
    "relation": "R",
    "parameter": "p",
}


def _fail(message: str, code: int) -> int:
    print(message, file=sys.stderr)
    return code


def _resolve_warehouse(args, required: bool) -> OntologyWarehouse | None:
    path = getattr(args, "warehouse", None) or os.environ.get("AXIOM_WAREHOUSE")
    if path is None:
        if required:
            raise SystemExit(_fail(
                "no ontology warehouse: pass --warehouse or set AXIOM_WAREHOUSE",
                USAGE_ERROR))
        return None
    try:
        return OntologyWarehouse(path)
    except AxiomForgeError as exc:
        raise SystemExit(_fail(str(exc), USAGE_ERROR)) from None


def _render_options(args) -> RenderOptions:
    return RenderOptions(negation_flavor=getattr(args, "negation_flavor", "not"))


def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- validate ---------------------------------------------------------------

def cmd_validate(args) -> int:
    status = 0
    for name in args.files:
        path = Path(name)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            return _fail(f"cannot read {path}: {exc}", USAGE_ERROR)
        try:
            parse_document(text, str(path))
        except AxiomForgeError as exc:
            print(str(exc), file=sys.stderr)
            status = DOMAIN_ERROR
        else:
            print(f"{path}: ok")
    return status


# --- tree -------------------------------------------------------------------

def _tree_lines(node: dict, depth: int, lines: list[str]) -> None:
    letter = TREE_LETTERS.get(node["kind"], "?")
    text = node.get("display") or node.get("label", "")
    suffix = " [unloaded]" if node.get("stub") else ""
    marker = ""
    inheritance = node.get("inheritance")
    if inheritance and inheritance != "own":
        marker = f" ({inheritance})"
    lines.append(f"{'  ' * depth}{letter} {text}{marker}{suffix}")
    for child in node.get("children", []):
        _tree_lines(child, depth + 1, lines)


def cmd_tree(args) -> int:
    warehouse = _resolve_warehouse(args, required=bool(args.iris))
    registry = OntologyRegistry(warehouse)
    for ref in args.iris:
        if Path(ref).is_file():
            registry.load_ontology_file(ref)
        else:
            registry.load_ontology_by_iri(ref)
    lines: list[str] = []
    for onto in registry.registry_tree():
        lines.append(onto["display"])
        for child in onto.get("children", []):
            _tree_lines(child, 1, lines)
    print("\n".join(lines))
    return 0


# --- replay -----------------------------------------------------------------

def _restored_engine(registry: OntologyRegistry, path: str):
    from .engine import AxiomEngine, EditMode

    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise BadDocument(f"cannot read model document {path}: {exc}") from None
    model_data = document.get("model") if isinstance(document, dict) else None
    if not isinstance(model_data, dict):
        raise BadDocument(f"{path}: expected an object with a 'model'")
    model, _geometry = AxiomModel.from_dict(model_data)
    for iri in model.referenced_ontologies():
        if norm_iri(iri) not in registry.ontologies:
            registry.load_ontology_by_iri(iri)
    engine = AxiomEngine(model, registry)
    if document.get("mode") == "advanced":
        engine.set_mode(EditMode.ADVANCED)
    return engine


def cmd_replay(args) -> int:
    warehouse = _resolve_warehouse(args, required=True)
    registry = OntologyRegistry(warehouse)
    try:
        ops = scripts.load_script(args.script)
        engine = None
        if args.load_model:
            engine = _restored_engine(registry, args.load_model)
        engine = scripts.run_script(ops, registry, at_step=args.at_step,
                                    engine=engine)
    except AxiomForgeError as exc:
        where = ""
        if hasattr(exc, "op_index"):
            where = f"op {exc.op_index}"
            if getattr(exc, "step", 0):
                where += f" (step {exc.step})"
            where += ": "
        return _fail(f"{where}{exc.code}: {exc}", DOMAIN_ERROR)
    text = codegen.generate_axiom_text(engine.model, registry,
                                       _render_options(args))
    _write_output(text, args.output)
    if args.save_model:
        document = {"model": engine.model.to_dict(), "mode": engine.mode.value}
        Path(args.save_model).write_text(
            json.dumps(document, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8")
    return 0


# --- export-capability ------------------------------------------------------

def cmd_export_capability(args) -> int:
    warehouse = _resolve_warehouse(args, required=True)
    try:
        spec = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except OSError as exc:
        return _fail(f"cannot read {args.spec}: {exc}", USAGE_ERROR)
    except ValueError as exc:
        return _fail(f"{args.spec}: not valid JSON: {exc}", DOMAIN_ERROR)
    sections = spec.get("sections") if isinstance(spec, dict) else None
    if not sections:
        return _fail(f"{args.spec}: no capability sections", USAGE_ERROR)
    skeletons = []
    try:
        for section in sections:
            kind = section.get("kind")
            if kind not in codegen.SECTION_ORDER:
                raise BadDocument(f"bad capability section kind: {kind!r}")
            if "ops" in section:
                ops = section["ops"]
                if not isinstance(ops, list):
                    raise BadDocument("section 'ops' must be a list")
            elif "script" in section:
                script_path = Path(args.spec).parent / section["script"]
                ops = scripts.load_script(script_path)
            else:
                raise BadDocument(f"section '{kind}' has no 'ops' or 'script'")
            registry = OntologyRegistry(warehouse)
            engine = scripts.run_script(ops, registry)
            body = codegen.axiom_body_block(engine.model, registry,
                                            _render_options(args))
            skeletons.append(CapabilitySkeleton(
                kind=kind,
                body_text=body,
                description=section.get("description"),
                shared_variables=tuple(section.get("shared_variables", ())),
            ))
        text = codegen.emit_capability(skeletons)
    except AxiomForgeError as exc:
        return _fail(f"{exc.code}: {exc}", DOMAIN_ERROR)
    _write_output(text + "\n" if not text.endswith("\n") else text, args.output)
    return 0


# --- serve ------------------------------------------------------------------

def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        return _fail(f"bad --listen address: {args.listen!r} "
                     "(expected host:port)", USAGE_ERROR)
    warehouse = _resolve_warehouse(args, required=False)
    registry = OntologyRegistry(warehouse)
    app = create_app(registry)
    try:
        uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    except (OSError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and not exc.code:
            return 0
        return _fail(f"server failed to start on {args.listen}: {exc}",
                     DOMAIN_ERROR)
    return 0


# --- entry ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axiomforge",
        description="Ontology-guided WSML axiom tooling")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate", help="parse WSML files and report problems")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tree", help="print loaded ontologies as a tree")
    p.add_argument("iris", nargs="*", metavar="IRI_OR_FILE")
    p.add_argument("--warehouse", metavar="DIR")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("replay", help="run an operation script, print the axiom")
    p.add_argument("script", metavar="SCRIPT.json")
    p.add_argument("--warehouse", metavar="DIR")
    p.add_argument("-o", "--output", metavar="FILE")
    p.add_argument("--at-step", type=int, metavar="N",
                   help="stop after the last entry labelled with step <= N")
    p.add_argument("--load-model", metavar="FILE",
                   help="start from a saved model document instead of empty")
    p.add_argument("--save-model", metavar="FILE",
                   help="also write the final model document as JSON")
    p.add_argument("--negation-flavor", choices=NEGATION_FLAVORS,
                   default="not")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("export-capability",
                       help="assemble a capability from replayed sections")
    p.add_argument("spec", metavar="SPEC.json")
    p.add_argument("--warehouse", metavar="DIR")
    p.add_argument("-o", "--output", metavar="FILE")
    p.add_argument("--negation-flavor", choices=NEGATION_FLAVORS,
                   default="not")
    p.set_defaults(func=cmd_export_capability)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--listen", default="127.0.0.1:8640", metavar="HOST:PORT")
    p.add_argument("--warehouse", metavar="DIR")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    except AxiomForgeError as exc:
        return _fail(f"{exc.code}: {exc}", DOMAIN_ERROR)


if __name__ == "__main__":
    raise SystemExit(main())
