#!/usr/bin/env python3

import os
import sys
import json
import hashlib
import logging
import argparse
import importlib.util

import numpy as np

logger = logging.getLogger(__name__)

INPUT_COMMANDS = ('homology', 'cofibrant', 'minimal', 'derived', 'hybridize', 'reconstruct', 'ss')


def check_dependencies():
    """Check if all required dependencies are installed"""
    required_packages = {
        'numpy': 'numpy',
        'dotenv': 'python-dotenv',
        'psutil': 'psutil'
    }

    missing_packages = [package for module, package in required_packages.items()
                        if importlib.util.find_spec(module) is None]
    if missing_packages:
        print(f"Error: Missing required packages: {', '.join(missing_packages)}", file=sys.stderr)
        print("Install them with: pip install -r requirements.txt", file=sys.stderr)
        return False
    return True


def _read_input(args):
    """Load the --input file once and remember its digest"""
    from diagram_file import parse
    from errors import ValidationError

    if not args.input:
        raise ValidationError(f"'{args.command}' needs --input PATH")
    if not os.path.exists(args.input):
        raise ValidationError(f"Input file not found: {args.input}")
    with open(args.input, 'rb') as f:
        raw = f.read()
    args.input_digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode('utf-8')
    except UnicodeDecodeError as e:
        raise ValidationError(f"Input is not UTF-8: {e.reason}") from e
    return parse(text, prime=args.prime)


def _diagram_input(args):
    from errors import ValidationError

    x = _read_input(args)
    if x.diagram is None:
        raise ValidationError(f"'{args.command}' needs a poset section", section="poset")
    return x.diagram


def _bidegree_table(entries):
    return [{"p": p, "q": q, "dim": d} for (p, q), d in sorted(entries.items()) if d]


def run_homology(args):
    """Betti numbers per object and induced maps along every cover"""
    from chain import induced_map

    x = _read_input(args)
    if x.diagram is None:
        total = x.double.total() if x.double is not None else x.filtered.stages[-1]
        return {"total": {"betti": total.betti()}}
    d = x.diagram
    return {
        "objects": {o: c.betti() for o, c in d.objects.items()},
        "maps": {f"{a}<{b}": {str(n): induced_map(f, n).tolist() for n in range(d.top + 1)}
                 for (a, b), f in d.arrows.items()},
    }


def run_cofibrant(args):
    """Reedy cofibrant replacement with quasi-isomorphism and latching checks"""
    from chain import is_quasi_iso
    from diagram import latching, reedy_cofibrant_replace
    from errors import InvariantBreach
    from exactalg import rank

    d = _diagram_input(args)
    replaced, back = reedy_cofibrant_replace(d)
    report = {"objects": {}}
    for o in d.index.objects:
        c = replaced.objects[o]
        injective = True
        if d.index.lower_covers(o):
            _, latch = latching(replaced, o)
            injective = all(rank(latch.component(n), d.p) == latch.source.dim(n)
                            for n in range(latch.source.top + 1))
        report["objects"][o] = {"dims": list(c.dims), "quasi_iso": is_quasi_iso(back[o]),
                                "latching_injective": injective}
        if not injective or not report["objects"][o]["quasi_iso"]:
            raise InvariantBreach(f"Reedy replacement failed at {o}")
    return report


def run_minimal(args):
    """Minimal cofibrant model and its standard-form check"""
    from diagram import minimal_cofibrant_check, minimal_cofibrant_replace
    from errors import InvariantBreach

    d = _diagram_input(args)
    minimal, _ = minimal_cofibrant_replace(d)
    problems = minimal_cofibrant_check(minimal)
    if problems:
        raise InvariantBreach(problems[0])
    return {"objects": {o: list(c.dims) for o, c in minimal.objects.items()}}


def run_derived(args):
    """Der^k of the input diagram"""
    from hybrid import derived_k

    d = _diagram_input(args)
    g = derived_k(d, args.level, args.config.max_gamma)
    return {"level": args.level, "derived": g.to_record()}


def run_hybridize(args):
    """Hyb^k, one record per hybridization step"""
    from hybrid import hybridize

    d = _diagram_input(args)
    run = hybridize(d, args.level)
    return {
        "level": args.level,
        "steps": [step.to_record() for step in run.levels],
        "high": {o: list(c.dims) for o, c in run.hybrid.high.objects.items()},
    }


def run_reconstruct(args):
    """Certify that Hyb^k recovers the k-truncation of the input"""
    from hybrid import verify_theorem_a

    d = _diagram_input(args)
    return verify_theorem_a(d, args.level).to_record()


def run_ss(args):
    """Pages E^1..E^r, E^∞ and the chase cross-check"""
    from errors import CertificationError, ValidationError
    from specseq import classical_pages, cross_check, e_infinity, graded_homology

    x = _read_input(args)
    source = x.double if x.double is not None else x.filtered
    if source is None:
        raise ValidationError("'ss' needs a double or filtered section", section="double")
    pages = classical_pages(source, args.page)
    report = {
        "pages": [page.to_record() for page in pages],
        "e_infinity": _bidegree_table(e_infinity(source)),
        "graded_homology": _bidegree_table(graded_homology(source)),
    }
    if args.page >= 2:
        check = cross_check(source, args.page)
        report["cross_check"] = {k: v for k, v in check.to_record().items() if k != "pages"}
        if not check.ok:
            raise CertificationError(check.failures[0], report=report)
    return report


def run_check(args):
    """Seeded property suites"""
    from checks import run_suites
    from errors import CertificationError

    config = args.config
    results = run_suites(args.suite, seed=config.seed, p=config.prime, cases=args.cases)
    report = {"seed": config.seed, "prime": config.prime,
              "suites": [r.to_record() for r in results]}
    failed = [r.name for r in results if not r.ok]
    if failed:
        raise CertificationError(f"Suites failed: {', '.join(failed)}", report=report)
    return report


def run_gen(args):
    """Write a generated example as a diagram file"""
    from diagram_file import serialize
    from generators import gen_cube, gen_example01, gen_fan, gen_minimal, random_double_complex

    p = args.config.prime
    if args.kind == 'cube':
        x = gen_cube(args.n, args.dim, p)
    elif args.kind == 'minimal':
        x = gen_minimal(args.n, args.dim, p)
    elif args.kind == 'example01':
        x = gen_example01(args.dim, p, split=args.split)
    elif args.kind == 'fan':
        x = gen_fan(args.m, args.dim, args.k, p)
    else:
        x = random_double_complex(np.random.default_rng(args.config.seed), p,
                                  width=args.width, height=args.height)
    text = serialize(x)
    digest = hashlib.sha256(text.encode('utf-8')).hexdigest()
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info("Wrote %s example to %s", args.kind, args.out)
    else:
        sys.stdout.write(text)
    return {"kind": args.kind, "prime": p, "digest": digest, "path": args.out}


def run_history(args):
    """List stored runs, newest first; --id shows one run in full, --digest or --input those on one file"""
    from errors import ValidationError
    from report_store import SUMMARY_FIELDS, ReportStore

    store = ReportStore(args.config.report_db)
    if args.id:
        row = store.get_report_by_id(args.id)
        if row is None:
            raise ValidationError(f"No recorded run with id {args.id}")
        return {"run": row}
    digest = args.digest
    if digest is None and args.input:
        if not os.path.exists(args.input):
            raise ValidationError(f"Input file not found: {args.input}")
        with open(args.input, 'rb') as f:
            digest = hashlib.sha256(f.read()).hexdigest()
    if digest is not None:
        rows = store.find_by_digest(digest, command=args.of, limit=args.limit)
    else:
        rows = store.get_reports(limit=args.limit)
    return {"runs": [{k: row[k] for k in SUMMARY_FIELDS} for row in rows]}


def show_help(args):
    """Show detailed help information about commands"""
    commands = {
        'homology': {
            'description': 'Betti numbers of every object and the induced maps along each cover',
            'usage': 'simplechain --input FILE homology',
            'example': 'simplechain --input cube3.json homology'
        },
        'cofibrant': {
            'description': 'Reedy cofibrant replacement, checking quasi-isomorphisms and latching maps',
            'usage': 'simplechain --input FILE cofibrant',
            'example': 'simplechain --input square.json cofibrant'
        },
        'minimal': {
            'description': 'Minimal cofibrant model in spheres-and-disks form',
            'usage': 'simplechain --input FILE minimal',
            'example': 'simplechain --input square.json minimal'
        },
        'derived': {
            'description': 'Derived diagram Der^k: homology, kernel objects and pair differentials',
            'usage': 'simplechain --input FILE derived --level K',
            'example': 'simplechain --input cube3.json --output structured derived --level 2'
        },
        'hybridize': {
            'description': 'Hybrid diagram Hyb^k with one record per hybridization step',
            'usage': 'simplechain --input FILE hybridize --level K',
            'example': 'simplechain --input cube3.json hybridize --level 1'
        },
        'reconstruct': {
            'description': 'Certify that Hyb^k recovers the k-truncation objectwise and naturally',
            'usage': 'simplechain --input FILE reconstruct --level K',
            'example': 'simplechain --input minimal3.json reconstruct --level 3'
        },
        'ss': {
            'description': 'Spectral-sequence pages of a double or filtered complex, cross-checked by chasing',
            'usage': 'simplechain --input FILE ss --page R',
            'example': 'simplechain --input double.json ss --page 3'
        },
        'check': {
            'description': 'Run the seeded property suites',
            'usage': 'simplechain [--seed N] check [--suite NAME] [--cases N]',
            'example': 'simplechain --seed 7 check --suite fans --cases 20'
        },
        'gen': {
            'description': 'Write a generated example (cube, minimal, example01, fan, double) as a diagram file',
            'usage': 'simplechain [--prime P] gen KIND [--n N] [--dim D] [--m M] [--k K] [--split] [--out PATH]',
            'example': 'simplechain --prime 2 gen cube --n 3 --dim 1 --out cube3.json'
        },
        'history': {
            'description': 'List recorded runs from the report database, or show one run in full',
            'usage': 'simplechain [--input FILE] history [--limit N] [--id ID | --digest SHA256] [--of COMMAND]',
            'example': 'simplechain --input cube3.json history --of derived'
        },
        'help': {
            'description': 'Show detailed help information about commands',
            'usage': 'simplechain help [COMMAND]',
            'example': 'simplechain help derived'
        }
    }

    if args.command_name:
        if args.command_name in commands:
            cmd = commands[args.command_name]
            print(f"\nCommand: {args.command_name}")
            print(f"Description: {cmd['description']}")
            print(f"Usage: {cmd['usage']}")
            print(f"Example: {cmd['example']}")
        else:
            print(f"Error: Unknown command '{args.command_name}'")
            print("Use 'simplechain help' to see all available commands")
    else:
        print("\nSimpleChain - exact homological algebra of poset diagrams over F_p")
        print("\nAvailable commands:")
        for cmd_name, cmd_info in commands.items():
            print(f"\n  {cmd_name}")
            print(f"    {cmd_info['description']}")


def _flatten(value, prefix=""):
    if isinstance(value, dict):
        for key in sorted(value):
            yield from _flatten(value[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(value, list) and any(isinstance(v, dict) for v in value):
        for i, v in enumerate(value):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, value


def render(report, output):
    """Report text: sorted JSON for 'structured', a fixed-width key/value table for 'text'"""
    if output == 'structured':
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    lines = [f"\nSimpleChain {report['command']} ({report['status']}):", "=" * 50]
    for key, value in _flatten(report['result']):
        lines.append(f"{key:40}: {json.dumps(value) if isinstance(value, list) else value}")
    return "\n".join(lines) + "\n"


def record_run(args, report, exit_code):
    """Store the run in the report history; failures here never change the exit status"""
    import psutil
    from report_store import ReportStore

    try:
        rss = psutil.Process().memory_info().rss // 1024
        ReportStore(args.config.report_db).add_report(
            args.command, getattr(args, 'input_digest', None), args.config.prime,
            report['status'], exit_code, report, peak_rss_kb=rss)
    except Exception as e:
        logger.warning("Could not record run: %s", e)


def build_parser():
    parser = argparse.ArgumentParser(description='SimpleChain - exact homological algebra of poset diagrams')
    parser.add_argument('--input', metavar='PATH', help='Diagram file')
    parser.add_argument('--prime', type=int, help='Field characteristic (overrides the file and PRIME)')
    parser.add_argument('--output', choices=('text', 'structured'), default='text', help='Report format')
    parser.add_argument('--seed', type=int, help='Seed for randomized generators and suites')
    parser.add_argument('--max-gamma', type=int, help='Cap on incomparable family size')
    parser.add_argument('--env-file', metavar='PATH', help='Load configuration from this .env file')
    parser.add_argument('--no-record', action='store_true', help='Do not store the run in the report history')
    parser.add_argument('--log-level', help='Logging level (overrides LOG_LEVEL)')
    subparsers = parser.add_subparsers(dest='command', help='Commands')

    subparsers.add_parser('homology', help='Homology of every object').set_defaults(func=run_homology)
    subparsers.add_parser('cofibrant', help='Reedy cofibrant replacement').set_defaults(func=run_cofibrant)
    subparsers.add_parser('minimal', help='Minimal cofibrant model').set_defaults(func=run_minimal)

    derived_parser = subparsers.add_parser('derived', help='Derived diagram Der^k')
    derived_parser.add_argument('--level', type=int, required=True, help='Level k ≥ 1')
    derived_parser.set_defaults(func=run_derived)

    hybridize_parser = subparsers.add_parser('hybridize', help='Hybrid diagram Hyb^k')
    hybridize_parser.add_argument('--level', type=int, required=True, help='Level k ≥ 0')
    hybridize_parser.set_defaults(func=run_hybridize)

    reconstruct_parser = subparsers.add_parser('reconstruct', help='Certify Hyb^k against the truncation')
    reconstruct_parser.add_argument('--level', type=int, required=True, help='Level k ≥ 0')
    reconstruct_parser.set_defaults(func=run_reconstruct)

    ss_parser = subparsers.add_parser('ss', help='Spectral-sequence pages')
    ss_parser.add_argument('--page', type=int, required=True, help='Last page r ≥ 1')
    ss_parser.set_defaults(func=run_ss)

    check_parser = subparsers.add_parser('check', help='Run property suites')
    check_parser.add_argument('--suite', action='append', help='Suite name (repeatable, default all)')
    check_parser.add_argument('--cases', type=int, help='Cases per suite')
    check_parser.set_defaults(func=run_check)

    gen_parser = subparsers.add_parser('gen', help='Generate an example diagram file')
    gen_parser.add_argument('kind', choices=('cube', 'minimal', 'example01', 'fan', 'double'))
    gen_parser.add_argument('--n', type=int, default=3, help='Cube dimension or ladder length')
    gen_parser.add_argument('--dim', type=int, default=1, help='Dimension of V or K')
    gen_parser.add_argument('--m', type=int, default=2, help='Number of fan legs')
    gen_parser.add_argument('--k', type=int, default=0, help='Fan kernel degree')
    gen_parser.add_argument('--split', action='store_true', help='Split model of example01')
    gen_parser.add_argument('--width', type=int, default=4, help='Columns of a random double complex')
    gen_parser.add_argument('--height', type=int, default=3, help='Rows of a random double complex')
    gen_parser.add_argument('--out', metavar='PATH', help='Write here instead of stdout')
    gen_parser.set_defaults(func=run_gen)

    history_parser = subparsers.add_parser('history', help='List recorded runs')
    history_parser.add_argument('--limit', type=int, default=20, help='Maximum number of runs to list')
    lookup = history_parser.add_mutually_exclusive_group()
    lookup.add_argument('--id', help='Show one recorded run with its full report')
    lookup.add_argument('--digest', help='Only runs on the input with this SHA-256 digest')
    history_parser.add_argument('--of', metavar='COMMAND', help='Only runs of this command')
    history_parser.set_defaults(func=run_history)

    help_parser = subparsers.add_parser('help', help='Show detailed help information')
    help_parser.add_argument('command_name', nargs='?', help='Show help for specific command')
    help_parser.set_defaults(func=show_help)
    return parser


def main(argv=None):
    """Run one command; return its exit status"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 0
    if args.command == 'help':
        show_help(args)
        return 0
    if not check_dependencies():
        return 1

    from config import load_config
    from errors import SimpleChainError

    try:
        args.config = load_config(args.env_file).override(args.prime, args.max_gamma, args.seed)
    except SimpleChainError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code

    level = (args.log_level or args.config.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)]
    )

    exit_code = 0
    try:
        result = args.func(args)
        report = {"command": args.command, "status": "ok", "result": result}
    except SimpleChainError as e:
        logger.error("%s failed: %s", args.command, e)
        exit_code = e.exit_code
        detail = getattr(e, 'report', None)
        if detail is not None and hasattr(detail, 'to_record'):
            detail = detail.to_record()
        report = {"command": args.command, "status": "failed", "error": str(e),
                  "result": detail if detail is not None else {}}
        print(f"Error: {e}", file=sys.stderr)

    if args.command in INPUT_COMMANDS and getattr(args, 'input', None):
        report["input"] = os.path.basename(args.input)
    if not (args.command == 'gen' and not args.out and exit_code == 0):
        sys.stdout.write(render(report, args.output))
    if not args.no_record and args.command != 'history':
        record_run(args, report, exit_code)
    return exit_code


if __name__ == '__main__':
    sys.exit(main())
