"""Command-line surface: train, predict, fuse, synth, action.

Exit codes: 0 success, 1 usage or bad parameters, 2 missing model or
modality, 3 input file failed to decode.  Every run with identical inputs,
flags, and seeds produces byte-identical stdout and output files; warnings
go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from dataclasses import replace
from itertools import product
from pathlib import Path

from .action_learning import (
    ActionExample,
    action_repl,
    predict_action,
    train_actions,
)
from .audio_pipeline import (
    acoustic_features,
    analysis_window,
    decode_wav,
    encode_wav,
    magnitude_spectrum,
    synth_ambient,
)
from .clustering import KMeansParams
from .errors import (
    BadHeader,
    BadMagic,
    BadProfile,
    BadSpec,
    BadVersion,
    ClipTooShort,
    ClockSkew,
    ConflictingExamples,
    DegenerateImage,
    DimensionMismatch,
    EmptyData,
    EmptyTrainingSet,
    InconsistentDims,
    IoError,
    MalformedRiff,
    MissingClassifier,
    ModalityMismatch,
    SchemaError,
    TooFewExamples,
    TooFewPoints,
    TruncatedPixelData,
    UnknownLabel,
    UnsupportedFormat,
    UnsupportedMaxval,
    ZeroK,
)
from .features import ACOUSTIC, VISUAL
from .fusion import IDENTIFIED, NO_SCENE, initial_state, on_acoustic, on_visual_photo
from .persistence import (
    EventScript,
    ModelBundle,
    ScriptEvent,
    format_event_script,
    load_bundle,
    load_event_script,
    save_bundle,
)
from .scene_model import TrainingSet, classify, train_classifier
from .vision_pipeline import (
    decode_ppm,
    dominant_colors,
    encode_ppm,
    palette_features,
    synth_scene_image,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_MODEL = 2
EXIT_BAD_INPUT = 3

WINDOW_SECONDS = 5.0
DEFAULT_COLOR_COUNT = 3

# audio presets are fractions of the Nyquist frequency so they stay valid
# at any sample rate; the two bands never overlap
_AUDIO_PRESETS = {
    "coffee": (((0.04, 0.22), 1.0),),
    "gym": (((0.55, 0.95), 1.0),),
}
_IMAGE_PRESETS = {
    "coffee": (
        ((139, 90, 43), 0.6),
        ((222, 202, 175), 0.3),
        ((245, 245, 245), 0.1),
    ),
    "gym": (
        ((230, 120, 30), 0.5),
        ((40, 60, 160), 0.3),
        ((120, 120, 120), 0.2),
    ),
}

_DECODE_ERRORS = (
    MalformedRiff,
    UnsupportedFormat,
    EmptyData,
    ClipTooShort,
    BadMagic,
    BadHeader,
    TruncatedPixelData,
    UnsupportedMaxval,
    DegenerateImage,
    IoError,
    SchemaError,
    BadVersion,
)
_USAGE_ERRORS = (
    BadSpec,
    BadProfile,
    TooFewExamples,
    TooFewPoints,
    InconsistentDims,
    ModalityMismatch,
    DimensionMismatch,
    ConflictingExamples,
    EmptyTrainingSet,
    UnknownLabel,
    ZeroK,
    ClockSkew,
    ValueError,
)


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped onto exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _read_wav(path: str):
    try:
        return decode_wav(_read_bytes(path), source_id=path)
    except (MalformedRiff, UnsupportedFormat, EmptyData) as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def _read_ppm(path: str):
    try:
        return decode_ppm(_read_bytes(path))
    except (BadMagic, BadHeader, TruncatedPixelData, UnsupportedMaxval) as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def _audio_vector(path: str, dump_spectrum: str | None = None):
    clip = _read_wav(path)
    try:
        spectrum = magnitude_spectrum(analysis_window(clip, WINDOW_SECONDS))
    except ClipTooShort as exc:
        raise ClipTooShort(f"{path}: {exc}") from exc
    if dump_spectrum is not None:
        lines = ["freq_hz,amplitude"]
        lines += [
            f"{float(f)!r},{float(a)!r}"
            for f, a in zip(spectrum.freqs_hz, spectrum.amps)
        ]
        Path(dump_spectrum).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return acoustic_features(spectrum)


def _visual_vector(path: str, color_count: int, params: KMeansParams):
    image = _read_ppm(path)
    try:
        palette = dominant_colors(image, color_count, params)
    except DegenerateImage as exc:
        raise DegenerateImage(f"{path}: {exc}") from exc
    return palette_features(palette)


def _load_or_new_bundle(path: str) -> ModelBundle:
    if Path(path).exists():
        return load_bundle(path)
    return ModelBundle()


def _load_bundle_required(path: str) -> ModelBundle:
    if not Path(path).exists():
        raise MissingClassifier(f"bundle {path} not found")
    return load_bundle(path)


# --- train -----------------------------------------------------------------

def cmd_train(args) -> int:
    groups: list[tuple[str, list[str]]] = []
    for entry in args.scene:
        if len(entry) < 2:
            raise ValueError("--scene needs a name followed by at least one file")
        groups.append((entry[0], entry[1:]))

    params = KMeansParams(k=1, seed=args.seed, scale=args.scale)
    items = []
    if args.modality == ACOUSTIC:
        if args.k_override is not None:
            _warn("--k-override only affects visual training; ignored")
        rates: set[int] = set()
        for scene, files in groups:
            for path in files:
                clip = _read_wav(path)
                rates.add(clip.sample_rate_hz)
                try:
                    spectrum = magnitude_spectrum(analysis_window(clip, WINDOW_SECONDS))
                except ClipTooShort as exc:
                    raise ClipTooShort(f"{path}: {exc}") from exc
                items.append((scene, acoustic_features(spectrum)))
        if len(rates) > 1:
            _warn(f"mixed sample rates across training files: {sorted(rates)}")
    else:
        color_count = args.k_override if args.k_override is not None else DEFAULT_COLOR_COUNT
        for scene, files in groups:
            for path in files:
                items.append((scene, _visual_vector(path, color_count, params)))

    training_set = TrainingSet(modality=args.modality, items=tuple(items))
    classifier = train_classifier(training_set, params)
    for message in classifier.warnings:
        _warn(message)

    bundle = replace(_load_or_new_bundle(args.out), **{args.modality: classifier})
    save_bundle(bundle, args.out)

    counts = Counter(scene for scene, _ in items)
    for scene in sorted(counts):
        print(f"scene={scene} examples={counts[scene]}")
    print(
        f"trained modality={args.modality} k={len(classifier.cluster_names)} "
        f"dim={classifier.feature_dim} inertia={classifier.model.inertia!r}"
    )
    print(f"wrote {args.out}")
    return EXIT_OK


# --- predict ---------------------------------------------------------------

def cmd_predict(args) -> int:
    bundle = _load_bundle_required(args.bundle)
    classifier = getattr(bundle, args.modality)
    if classifier is None:
        raise MissingClassifier(f"bundle has no {args.modality} classifier")
    if args.modality == ACOUSTIC:
        vector = _audio_vector(args.file, args.dump_spectrum)
    else:
        if args.dump_spectrum is not None:
            _warn("--dump-spectrum only applies to acoustic prediction; ignored")
        color_count = classifier.feature_dim // 3
        vector = _visual_vector(args.file, color_count, classifier.model.params)
    prediction = classify(classifier, vector, now=0.0)
    print(f"scene={prediction.scene} confidence={prediction.confidence:.3f}")
    return EXIT_OK


# --- fuse ------------------------------------------------------------------

def cmd_fuse(args) -> int:
    bundle = _load_bundle_required(args.bundle)
    if bundle.acoustic is None:
        raise MissingClassifier("bundle has no acoustic classifier")
    if bundle.visual is None:
        raise MissingClassifier("bundle has no visual classifier")
    config = bundle.fusion_config
    if args.window_av is not None:
        config = replace(config, acoustic_visual_window_s=args.window_av)
    if args.window_photo is not None:
        config = replace(config, photo_window_s=args.window_photo)
    if args.photos_required is not None:
        config = replace(config, photos_required=args.photos_required)
    if args.min_confidence is not None:
        config = replace(config, min_combined_confidence=args.min_confidence)

    script = load_event_script(args.script)
    script_dir = Path(args.script).parent
    color_count = bundle.visual.feature_dim // 3

    state = initial_state()
    for event in script.events:
        path = Path(event.path)
        if not path.is_absolute():
            path = script_dir / path
        if event.kind == "audio":
            vector = _audio_vector(str(path))
            prediction = classify(bundle.acoustic, vector, now=event.at)
            state, decision = on_acoustic(state, prediction, config)
        else:
            vector = _visual_vector(str(path), color_count, bundle.visual.model.params)
            prediction = classify(bundle.visual, vector, now=event.at)
            state, decision = on_visual_photo(state, prediction, config)
        if decision.kind == IDENTIFIED:
            print(
                f"{decision.scene.capitalize()}Scene detected "
                f"(confidence={decision.combined_confidence:.3f})"
            )
        elif decision.kind == NO_SCENE:
            print("No scene detected")
    return EXIT_OK


# --- synth -----------------------------------------------------------------

def _parse_band(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise BadProfile(f"--band wants LOW:HIGH:GAIN, got {text!r}")
    try:
        low, high, gain = (float(p) for p in parts)
    except ValueError:
        raise BadProfile(f"--band fields must be numbers, got {text!r}") from None
    return (low, high), gain


def _parse_color(text: str):
    head, sep, tail = text.rpartition(":")
    if not sep:
        raise BadSpec(f"--color wants R,G,B:FRACTION, got {text!r}")
    channels = head.split(",")
    if len(channels) != 3:
        raise BadSpec(f"--color wants three channels, got {text!r}")
    try:
        color = tuple(int(c) for c in channels)
        fraction = float(tail)
    except ValueError:
        raise BadSpec(f"--color fields must be numbers, got {text!r}") from None
    return color, fraction


def _preset_profile(name: str, rate: int):
    nyquist = rate / 2.0
    return [((low * nyquist, high * nyquist), gain) for (low, high), gain in _AUDIO_PRESETS[name]]


def cmd_synth_audio(args) -> int:
    if args.preset is not None:
        profile = _preset_profile(args.preset, args.rate)
    elif args.band:
        profile = [_parse_band(text) for text in args.band]
    else:
        raise BadProfile("give either --preset or at least one --band")
    clip = synth_ambient(
        profile, args.seconds, args.rate, args.seed, components_per_band=args.components
    )
    Path(args.out).write_bytes(encode_wav(clip))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_synth_image(args) -> int:
    if args.preset is not None:
        spec = list(_IMAGE_PRESETS[args.preset])
    elif args.color:
        spec = [_parse_color(text) for text in args.color]
    else:
        raise BadSpec("give either --preset or at least one --color")
    image = synth_scene_image(spec, args.width, args.height, args.seed)
    Path(args.out).write_bytes(encode_ppm(image))
    print(f"wrote {args.out}")
    return EXIT_OK


def _shifted_fractions(spec, step: int):
    """Nudge a preset's fractions without reordering them, for photo variety."""
    delta = 0.02 * step
    (c0, f0), (c1, f1), *rest = list(spec)
    return [(c0, f0 + delta), (c1, f1 - delta)] + rest


def cmd_synth_matrix(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    def emit(name: str, payload: bytes) -> None:
        target = out_dir / name
        target.write_bytes(payload)
        written.append(str(target))

    scenes = tuple(sorted(_AUDIO_PRESETS))
    for offset, scene in enumerate(scenes):
        profile = _preset_profile(scene, args.rate)
        for i in range(1, 5):
            clip = synth_ambient(
                profile, args.seconds, args.rate, seed=args.seed * 1000 + offset * 100 + i
            )
            emit(f"train_{scene}_{i}.wav", encode_wav(clip))
        for t in range(1, args.trials + 1):
            clip = synth_ambient(
                profile, args.seconds, args.rate, seed=args.seed * 1000 + 500 + offset * 100 + t
            )
            emit(f"test_{scene}_{t}.wav", encode_wav(clip))
        for i in range(1, 4):
            spec = _shifted_fractions(_IMAGE_PRESETS[scene], i - 1)
            image = synth_scene_image(spec, 60, 40, seed=args.seed)
            emit(f"train_{scene}_{i}.ppm", encode_ppm(image))
            emit(f"test_{scene}_{i}.ppm", encode_ppm(image))

    for audio_scene, visual_scene in product(scenes, scenes):
        events = []
        for t in range(args.trials):
            base = 100.0 * t
            events.append(ScriptEvent(at=base, kind="audio", path=f"test_{audio_scene}_{t + 1}.wav"))
            for i in range(1, 4):
                events.append(
                    ScriptEvent(at=base + 4.0 + i, kind="image", path=f"test_{visual_scene}_{i}.ppm")
                )
        name = f"script_{audio_scene}_{visual_scene}.tsv"
        body = f"# audio={audio_scene} visual={visual_scene}\n" + format_event_script(
            EventScript(events=tuple(events))
        )
        (out_dir / name).write_text(body, encoding="utf-8")
        written.append(str(out_dir / name))

    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


# --- action ----------------------------------------------------------------

def _read_pairs(path: str) -> list[ActionExample]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read pairs file {path}: {exc}") from exc
    pairs: list[ActionExample] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw_line.split("\t")
        if len(parts) != 2:
            raise SchemaError(f"{path} line {lineno}: expected scene<TAB>action")
        scene, action = (part.strip() for part in parts)
        if not scene or not action:
            raise SchemaError(f"{path} line {lineno}: empty field")
        pairs.append(ActionExample(scene_label=scene, action_code=action))
    return pairs


def _save_net(net, out: str) -> None:
    bundle = replace(_load_or_new_bundle(out), action=net)
    save_bundle(bundle, out)


def cmd_action_train(args) -> int:
    pairs = _read_pairs(args.pairs)
    net, trace = train_actions(
        pairs,
        args.iterations,
        hidden_size=args.hidden,
        learning_rate=args.lr,
        seed=args.seed,
    )
    _save_net(net, args.out)
    print(
        f"trained action net scenes={len(net.scene_vocab)} "
        f"actions={len(net.action_vocab)} iterations={args.iterations}"
    )
    first = trace.errors[0][1]
    last = trace.errors[-1][1]
    print(f"error first={first!r} last={last!r}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_action_repl(args) -> int:
    net = action_repl(
        sys.stdin,
        sys.stdout,
        iterations=args.iterations,
        hidden_size=args.hidden,
        learning_rate=args.lr,
        seed=args.seed,
    )
    if args.out is not None:
        _save_net(net, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_action_predict(args) -> int:
    bundle = _load_bundle_required(args.bundle)
    if bundle.action is None:
        raise MissingClassifier("bundle has no trained action net")
    print(f"action={predict_action(bundle.action, args.label)}")
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="scenefuse", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    train = commands.add_parser("train", help="fit a scene classifier from labeled files")
    train.add_argument("--modality", choices=(ACOUSTIC, VISUAL), required=True)
    train.add_argument(
        "--scene",
        action="append",
        nargs="+",
        required=True,
        metavar="NAME FILE",
        help="scene name followed by its training files; repeatable",
    )
    train.add_argument("--out", required=True, help="bundle to create or merge into")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--scale", type=float, default=10000.0, help="confidence divisor")
    train.add_argument(
        "--k-override", type=int, default=None, help="dominant colors per image (visual only)"
    )
    train.set_defaults(handler=cmd_train)

    predict = commands.add_parser("predict", help="classify one file against a bundle")
    predict.add_argument("--modality", choices=(ACOUSTIC, VISUAL), required=True)
    predict.add_argument("--bundle", required=True)
    predict.add_argument("file")
    predict.add_argument(
        "--dump-spectrum", default=None, metavar="CSV", help="write freq,amplitude rows"
    )
    predict.set_defaults(handler=cmd_predict)

    fuse = commands.add_parser("fuse", help="replay an event script through fusion")
    fuse.add_argument("--bundle", required=True)
    fuse.add_argument("--script", required=True, help="TSV of at<TAB>kind<TAB>path")
    fuse.add_argument("--photos-required", type=int, default=None)
    fuse.add_argument("--window-av", type=float, default=None, help="acoustic-to-visual seconds")
    fuse.add_argument("--window-photo", type=float, default=None, help="first-to-last photo seconds")
    fuse.add_argument("--min-confidence", type=float, default=None)
    fuse.set_defaults(handler=cmd_fuse)

    synth = commands.add_parser("synth", help="render deterministic fixtures")
    synth_kinds = synth.add_subparsers(dest="synth_kind", required=True, parser_class=_Parser)

    synth_audio = synth_kinds.add_parser("audio")
    synth_audio.add_argument("--preset", choices=tuple(sorted(_AUDIO_PRESETS)), default=None)
    synth_audio.add_argument(
        "--band", action="append", metavar="LOW:HIGH:GAIN", help="explicit band; repeatable"
    )
    synth_audio.add_argument("--out", required=True)
    synth_audio.add_argument("--seed", type=int, default=0)
    synth_audio.add_argument("--seconds", type=float, default=5.0)
    synth_audio.add_argument("--rate", type=int, default=8000)
    synth_audio.add_argument("--components", type=int, default=16)
    synth_audio.set_defaults(handler=cmd_synth_audio)

    synth_image = synth_kinds.add_parser("image")
    synth_image.add_argument("--preset", choices=tuple(sorted(_IMAGE_PRESETS)), default=None)
    synth_image.add_argument(
        "--color", action="append", metavar="R,G,B:FRACTION", help="explicit color; repeatable"
    )
    synth_image.add_argument("--out", required=True)
    synth_image.add_argument("--width", type=int, default=64)
    synth_image.add_argument("--height", type=int, default=48)
    synth_image.add_argument("--seed", type=int, default=0)
    synth_image.set_defaults(handler=cmd_synth_image)

    synth_matrix = synth_kinds.add_parser(
        "matrix", help="emit the full two-scene train/test/script set"
    )
    synth_matrix.add_argument("--out-dir", required=True)
    synth_matrix.add_argument("--seed", type=int, default=1)
    synth_matrix.add_argument("--trials", type=int, default=3)
    synth_matrix.add_argument("--rate", type=int, default=8000)
    synth_matrix.add_argument("--seconds", type=float, default=5.0)
    synth_matrix.set_defaults(handler=cmd_synth_matrix)

    action = commands.add_parser("action", help="scene-to-action net")
    action_kinds = action.add_subparsers(dest="action_kind", required=True, parser_class=_Parser)

    action_train = action_kinds.add_parser("train")
    action_train.add_argument("--pairs", required=True, help="TSV of scene<TAB>action")
    action_train.add_argument("--out", required=True)
    action_train.add_argument("--iterations", type=int, default=100000)
    action_train.add_argument("--hidden", type=int, default=8)
    action_train.add_argument("--lr", type=float, default=0.5)
    action_train.add_argument("--seed", type=int, default=0)
    action_train.set_defaults(handler=cmd_action_train)

    action_repl_parser = action_kinds.add_parser("repl")
    action_repl_parser.add_argument("--out", default=None)
    action_repl_parser.add_argument("--iterations", type=int, default=100000)
    action_repl_parser.add_argument("--hidden", type=int, default=8)
    action_repl_parser.add_argument("--lr", type=float, default=0.5)
    action_repl_parser.add_argument("--seed", type=int, default=0)
    action_repl_parser.set_defaults(handler=cmd_action_repl)

    action_predict = action_kinds.add_parser("predict")
    action_predict.add_argument("label")
    action_predict.add_argument("--bundle", required=True)
    action_predict.set_defaults(handler=cmd_action_predict)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except MissingClassifier as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_MODEL
    except _DECODE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())
