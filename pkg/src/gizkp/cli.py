"""Command-line prover, experiment driver, and service launcher.

Exit codes are script-stable: 0 ok, 1 proof rejected, 2 registration
conflict, 3 network trouble, 4 account locked, 5 refused to act.

The password is taken from the GIZKP_PASSWORD environment variable or a
no-echo prompt; there is deliberately no --password flag, so secrets
never appear in argv or process listings.
"""

import argparse
import getpass
import json
import os
import random
import sys

from . import simulate
from .client import ApiClient, ServerRefusal, TransportError, login_account, register_account
from .config import Config, load_config
from .graphs import serialize_graph, serialize_permutation
from .kdf import Credentials, KdfParams, derive_identity
from .selftest import run_selftest

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_CONFLICT = 2
EXIT_NETWORK = 3
EXIT_LOCKED = 4
EXIT_REFUSED = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gizkp", description="graph-isomorphism zero-knowledge authentication")
    parser.add_argument("--server", help="verifier base URL (default from config)")
    parser.add_argument("--n", type=int, help="graph size for key derivation")
    parser.add_argument("--rounds", type=int, help="proof rounds (simulate/serve)")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--config", help="JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("register", help="derive keys locally and register the public pair")
    p.add_argument("--login", required=True)

    p = sub.add_parser("login", help="authenticate by running all proof rounds")
    p.add_argument("--login", required=True)

    p = sub.add_parser("serve", help="run the verifier service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)

    p = sub.add_parser("simulate", help="statistical soundness/completeness runs")
    p.add_argument("--kind", choices=("honest", "cheater"), required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--report-seed", type=int, default=None,
                   help="seed the simulation PRNG for a reproducible report")
    p.add_argument("--over-wire", action="store_true",
                   help="drive sessions through the HTTP service instead of in-process")

    p = sub.add_parser("derive", help="print the derived identity (debug)")
    p.add_argument("--login", required=True)
    p.add_argument("--insecure-show-secret", action="store_true",
                   help="allow printing the secret to a terminal")

    sub.add_parser("selftest", help="run built-in protocol checks")
    return parser


def read_password() -> str:
    password = os.environ.get("GIZKP_PASSWORD")
    if password:
        return password
    return getpass.getpass("password: ")


def _emit(args, data: dict, human: str):
    if args.json:
        print(json.dumps(data))
    else:
        print(human)


def _refusal_exit(exc: ServerRefusal) -> int:
    if exc.error_code == "conflict":
        return EXIT_CONFLICT
    if exc.error_code == "locked":
        return EXIT_LOCKED
    return EXIT_REJECTED


def cmd_register(args, config: Config) -> int:
    credentials = Credentials(args.login, read_password())
    params = KdfParams(n=args.n or config.n, hash_id=config.hash_id)
    try:
        with ApiClient(args.server or config.server_url) as api:
            register_account(api, credentials, params)
    except ServerRefusal as exc:
        print(f"registration failed: {exc}", file=sys.stderr)
        return _refusal_exit(exc)
    except TransportError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    _emit(args, {"status": "created", "login": args.login, "n": params.n},
          f"registered {args.login!r} (n={params.n})")
    return EXIT_OK


def cmd_login(args, config: Config) -> int:
    credentials = Credentials(args.login, read_password())
    try:
        with ApiClient(args.server or config.server_url) as api:
            outcome = login_account(api, credentials, hash_id=config.hash_id)
    except ServerRefusal as exc:
        print(f"login failed: {exc}", file=sys.stderr)
        return _refusal_exit(exc)
    except TransportError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    if outcome.accepted:
        _emit(args, {"verdict": "accepted", "token": outcome.token, "rounds": outcome.rounds_completed},
              f"accepted after {outcome.rounds_completed} rounds\ntoken: {outcome.token}")
        return EXIT_OK
    _emit(args, {"verdict": "rejected", "rounds": outcome.rounds_completed, "error_code": outcome.error_code},
          f"rejected at round {outcome.rounds_completed + 1} ({outcome.error_code})")
    return EXIT_LOCKED if outcome.error_code == "locked" else EXIT_REJECTED


def cmd_serve(args, config: Config) -> int:
    import uvicorn

    from .service import VerifierService, create_app

    if args.host or args.port or args.rounds:
        from dataclasses import replace

        config = replace(config, host=args.host or config.host, port=args.port or config.port,
                         rounds_total=args.rounds or config.rounds_total)
    app = create_app(VerifierService(config))
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return EXIT_OK


def cmd_simulate(args, config: Config) -> int:
    rounds = args.rounds or config.rounds_total
    n = args.n or 16  # small default keeps big trial counts fast
    if args.over_wire:
        report = _simulate_over_wire(args, config, rounds, args.n or config.n)
        if report is None:
            return EXIT_NETWORK
    else:
        report = simulate.run_simulation(args.kind, args.trials, rounds, n=n, report_seed=args.report_seed)
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        print(simulate.format_report(report))
    return EXIT_OK


def _simulate_over_wire(args, config: Config, rounds: int, n: int):
    """Drive each trial through the real HTTP surface.

    Uses a fresh throwaway login per cheater trial so failed sessions do
    not trip the lockout policy; the server's configured round count is
    what actually runs.
    """
    from .protocol import Challenge, CheatingProver, HonestProver

    rng = random.Random(args.report_seed) if args.report_seed is not None else random.SystemRandom()
    params = KdfParams(n=n, hash_id=config.hash_id)
    accepted = 0
    rounds_used = rounds
    try:
        with ApiClient(args.server or config.server_url) as api:
            for trial in range(args.trials):
                login = f"sim-{args.kind}-{rng.getrandbits(64):016x}"
                credentials = Credentials(login, f"sim-password-{trial}")
                identity = derive_identity(credentials, params)
                register_account(api, credentials, params)
                session = api.start_session(login)
                rounds_used = int(session["rounds_total"])
                prover = (HonestProver(identity, rng) if args.kind == "honest"
                          else CheatingProver(identity.public_pair, rng))
                try:
                    for _ in range(rounds_used):
                        commitment = prover.commit()
                        b = api.commit(session["session_id"], serialize_graph(commitment.h).hex())
                        reply = api.respond(session["session_id"],
                                            serialize_permutation(prover.respond(Challenge(b)).chi).hex())
                        if reply.get("verdict") == "accepted":
                            accepted += 1
                            break
                except ServerRefusal:
                    continue
    except TransportError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return None
    low, high = simulate.binomial_ci(accepted, args.trials)
    return simulate.SimulationReport(
        kind=args.kind, trials=args.trials, rounds=rounds_used, n=n, accepted=accepted,
        rate=accepted / args.trials, ci_low=low, ci_high=high,
        analytic_rate=1.0 if args.kind == "honest" else 2.0**-rounds_used,
        report_seed=args.report_seed,
    )


def cmd_derive(args, config: Config) -> int:
    if sys.stdout.isatty() and not args.insecure_show_secret:
        print("refusing to print a secret to a terminal (use --insecure-show-secret)", file=sys.stderr)
        return EXIT_REFUSED
    credentials = Credentials(args.login, read_password())
    params = KdfParams(n=args.n or config.n, hash_id=config.hash_id)
    identity = derive_identity(credentials, params)
    export = {
        "version": params.version_tag,
        "hash_id": params.hash_id,
        "n": params.n,
        "g1": serialize_graph(identity.public_pair.g1).hex(),
        "g2": serialize_graph(identity.public_pair.g2).hex(),
        "pi": serialize_permutation(identity.secret).hex(),
    }
    print(json.dumps(export, indent=None if args.json else 2))
    return EXIT_OK


def cmd_selftest(args, _config: Config) -> int:
    results = run_selftest()
    ok = all(r.passed for r in results)
    if args.json:
        print(json.dumps({"ok": ok, "checks": [r.__dict__ for r in results]}))
    else:
        for r in results:
            print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
        print("selftest:", "ok" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_REJECTED


_COMMANDS = {
    "register": cmd_register,
    "login": cmd_login,
    "serve": cmd_serve,
    "simulate": cmd_simulate,
    "derive": cmd_derive,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    return _COMMANDS[args.command](args, config)


if __name__ == "__main__":
    sys.exit(main())
