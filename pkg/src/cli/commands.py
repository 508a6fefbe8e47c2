"""
Command Dispatch
The residua commands on parsed documents, with text and JSON reports
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from loguru import logger

from cli.document import InputDocument, parse_coset, parse_normalizing
from core.config import Limits, current_limits
from core.errors import ValidationError
from diagrams.diagram import arithmetic_diagram, mu_mirrors, spectral_diagram, standardize
from diagrams.symmetry import eta_group, out_T_mu
from mu.oracle import oracle_orbit_count
from mu.split import is_weyl_invariant
from residual.central import central_character_image, check_disjointness
from residual.enumerate import enumerate_residual_cosets, enumerate_residual_points
from residual.formal_degree import formal_degree_of
from rootdata.parameters import affine_nodes, node_class
from stm import recipes
from stm.analysis import (
    FAIL,
    check_order_witness,
    correspondence_constants,
    excellent_subset,
    intertwiners,
    residual_correspondence,
)
from stm.transfer import NormalizedAlgebra, SpectralTransferMap, compose, morphism
from torus.point import parse_point

SCHEMA = "residua/1"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2


@dataclass
class Options:
    v0: Optional[Fraction] = None
    as_json: bool = False
    limits: Optional[Limits] = None


@dataclass
class Report:
    command: str
    lines: List[str] = field(default_factory=list)
    payload: Dict = field(default_factory=dict)
    refuted: bool = False

    @property
    def exit_code(self) -> int:
        return EXIT_REFUTED if self.refuted else EXIT_OK

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def json(self) -> str:
        body = {"schema": SCHEMA, "command": self.command, "refuted": self.refuted, "result": self.payload}
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def algebra_of(document: InputDocument) -> NormalizedAlgebra:
    datum = document.build_datum()
    return NormalizedAlgebra(datum, document.build_parameters(datum), document.build_normalization())


def build_map(document: InputDocument, source: NormalizedAlgebra, target: Optional[NormalizedAlgebra] = None,
              limits: Optional[Limits] = None) -> SpectralTransferMap:
    """
    The map described by the [stm] section of a document

    The map leaves the document's algebra and lands in target, the algebra of
    the next document, or in the same algebra when there is none. rank0 on a
    rank 0 document lands in target; on any other document it leaves the
    rank 0 algebra with normalization d0 and lands in the document's own.

    Raises:
        ValidationError: no [stm] section, unknown recipe, missing arguments
            or no covering between the two algebras
    """
    stm = document.stm
    if stm is None:
        raise ValidationError(f"{document.source} has no [stm] section")
    recipe = stm.recipe

    def required(value, key: str):
        if value is None:
            raise ValidationError(f"recipe '{recipe}' needs '{key}' in {document.source}")
        return value

    if recipe == recipes.IDENTITY:
        return recipes.identity_map(source)
    if recipe == recipes.WEYL:
        return recipes.weyl_map(source, [j - 1 for j in required(stm.word, "word")])
    if recipe == recipes.TRANSLATION:
        return recipes.translation_map(source, parse_point(required(stm.point, "point")))
    if recipe == recipes.ETA:
        return recipes.eta_map(source, required(stm.class_name, "class"))
    if recipe == recipes.INCLUSION:
        if target is None:
            raise ValidationError("recipe 'inclusion' needs a target document")
        return recipes.inclusion_map(source, target)
    if recipe == recipes.COVERING:
        if target is None:
            raise ValidationError("recipe 'covering' needs a target document")
        found = recipes.covering_maps(source, target, limits)
        if not found:
            raise ValidationError(f"no covering {source.name} -> {target.name} within the index bound")
        return found[0].representative
    if recipe == recipes.RANK0:
        point = parse_point(required(stm.point, "point"))
        if source.rank == 0:
            if target is None:
                raise ValidationError("recipe 'rank0' on a rank 0 document needs a target document")
            if stm.d0 is not None and parse_normalizing(stm.d0) != source.d:
                raise ValidationError(f"d0 = {stm.d0} differs from the normalization of {document.source}")
            return recipes.rank0_map(target, point, source.d, source)
        if stm.d0 is not None:
            d0 = parse_normalizing(stm.d0)
        else:
            degree = formal_degree_of(source.mu, point)
            if degree.half_variable:
                raise ValidationError(f"formal degree at {point.render()} has no certificate in v, give 'd0'")
            d0 = degree.certificate
        return recipes.rank0_map(source, point, d0)
    if recipe == recipes.EXPLICIT:
        landing = target or source
        coset = parse_coset(required(stm.coset, "coset"), landing.datum)
        return recipes.explicit_map(source, landing, required(stm.matrix, "matrix"),
                                    parse_point(required(stm.point, "point")), coset)
    raise ValidationError(f"unknown recipe '{recipe}', expected one of {', '.join(recipes.RECIPES)}")


def _single(documents: Sequence[InputDocument], command: str) -> InputDocument:
    if len(documents) != 1:
        raise ValidationError(f"{command} takes one document, got {len(documents)}")
    return documents[0]


def _pair(documents: Sequence[InputDocument], command: str) -> Sequence[InputDocument]:
    if not 1 <= len(documents) <= 2:
        raise ValidationError(f"{command} takes a source and an optional target document, got {len(documents)}")
    return documents


def _map_from(documents: Sequence[InputDocument], limits: Optional[Limits] = None) -> SpectralTransferMap:
    source = algebra_of(documents[0])
    target = algebra_of(documents[1]) if len(documents) > 1 else None
    return build_map(documents[0], source, target, limits)


# commands on one algebra

def residual_points(documents: Sequence[InputDocument], options: Options) -> Report:
    algebra = algebra_of(_single(documents, "residual-points"))
    orbits = enumerate_residual_points(algebra.datum, algebra.parameters, options.limits)
    report = Report("residual-points")
    report.lines.append(f"residual points of {algebra.name} with {algebra.parameters.render()}: {len(orbits)} orbits")
    for orbit in orbits:
        report.lines.append(f"  orbit size {orbit.size}: {orbit.representative.render()}")
    report.payload = {"algebra": algebra.to_dict(), "orbits": [o.to_dict() for o in orbits]}
    if options.v0 is not None:
        count = oracle_orbit_count(algebra.mu, float(options.v0), options.limits)
        report.lines.append(f"pole oracle at v0 = {options.v0}: {count} orbits on its grid")
        report.payload["oracle_orbits"] = count
    return report


def residual_cosets(documents: Sequence[InputDocument], options: Options) -> Report:
    algebra = algebra_of(_single(documents, "residual-cosets"))
    catalog = enumerate_residual_cosets(algebra.datum, algebra.parameters, algebra.d, options.limits)
    components = central_character_image(catalog)
    report = Report("residual-cosets", [catalog.render()])
    report.lines.append(f"central character image: {len(components)} components")
    report.payload = catalog.to_dict()
    report.payload["central_characters"] = [c.to_dict() for c in components]
    if options.v0 is not None:
        disjoint = check_disjointness(catalog, float(options.v0), options.limits)
        report.lines.append(f"tempered forms disjoint at v0 = {options.v0}: {'yes' if disjoint else 'no'}")
        report.payload["disjoint"] = disjoint
    return report


def mu(documents: Sequence[InputDocument], options: Options) -> Report:
    algebra = algebra_of(_single(documents, "mu"))
    function = algebra.mu
    invariant = is_weyl_invariant(function)
    report = Report("mu", [function.render(), f"W0-invariant: {'yes' if invariant else 'no'}"])
    report.payload = function.to_dict()
    report.payload["weyl_invariant"] = invariant
    return report


def fdeg(documents: Sequence[InputDocument], options: Options) -> Report:
    algebra = algebra_of(_single(documents, "fdeg"))
    orbits = enumerate_residual_points(algebra.datum, algebra.parameters, options.limits)
    report = Report("fdeg", [f"formal degrees of {algebra.render()}: {len(orbits)} orbits"])
    rows = []
    for orbit in orbits:
        degree = formal_degree_of(algebra.mu, orbit.representative)
        certificate = degree.certificate.render() + (" at v -> v^(1/2)" if degree.half_variable else "")
        line = (f"  {orbit.representative.render()}: {certificate}, "
                f"sign {'+' if degree.sign > 0 else '-'}, order {degree.order}")
        row = degree.to_dict()
        if options.v0 is not None:
            value = degree.at(options.v0)
            line += f", at v0 = {options.v0}: {value}"
            row["at_v0"] = str(value)
        report.lines.append(line)
        rows.append(row)
    report.payload = {"algebra": algebra.to_dict(), "formal_degrees": rows}
    return report


def spectral(documents: Sequence[InputDocument], options: Options) -> Report:
    algebra = algebra_of(_single(documents, "spectral-diagram"))
    diagram = spectral_diagram(algebra.datum, algebra.parameters)
    report = Report("spectral-diagram", [diagram.render()])
    report.payload = diagram.to_dict()
    if options.v0 is not None and algebra.parameters.is_standard():
        mirrors = mu_mirrors(algebra.datum, algebra.parameters, float(options.v0),
                             seed=current_limits(options.limits).sample_seed)
        report.lines.append(f"mu-mirrors at v0 = {options.v0} match the affine hyperplanes: "
                            f"{'yes' if mirrors.matches else 'no'}")
        report.payload["mirrors"] = mirrors.to_dict()
    return report


def arithmetic(documents: Sequence[InputDocument], options: Options) -> Report:
    algebra = algebra_of(_single(documents, "arithmetic-diagram"))
    diagram = arithmetic_diagram(algebra.datum, algebra.parameters)
    return Report("arithmetic-diagram", [diagram.render()], diagram.to_dict())


def symmetries(documents: Sequence[InputDocument], options: Options) -> Report:
    algebra = algebra_of(_single(documents, "symmetries"))
    standard = standardize(algebra.datum, algebra.parameters)
    group = out_T_mu(standard.datum, standard.parameters, algebra.d)
    report = Report("symmetries")
    if not standard.is_identity:
        report.lines.append(f"standardized first: doubled orbits {len(standard.doubled)}, twist {standard.twist}")
    report.lines.append(group.render())

    classes: Dict = {}
    for node in affine_nodes(algebra.datum):
        classes.setdefault(node_class(algebra.datum, node), node.name)
    names = [classes[key] for key in sorted(classes)]
    etas = eta_group(algebra.datum, algebra.parameters, names)
    report.lines.append(f"eta maps on classes {' '.join(names)}: group of order {etas.order}")
    report.payload = {"standardization": standard.to_dict(), "out_T_mu": group.to_dict(), "eta": etas.to_dict()}
    return report


# commands on transfer maps

def verify(documents: Sequence[InputDocument], options: Options) -> Report:
    found = morphism(_map_from(_pair(documents, "verify-stm"), options.limits), options.limits)
    return Report("verify-stm", [found.render()], found.to_dict(), refuted=not found.record.valid)


def compose_chain(documents: Sequence[InputDocument], options: Options) -> Report:
    """Documents d1 .. dk give the maps d1 -> d2 -> .. -> dk and their composite"""
    if len(documents) < 3:
        raise ValidationError(f"compose-stm needs at least three documents, got {len(documents)}")
    algebras = [algebra_of(d) for d in documents]
    maps = [build_map(documents[i], algebras[i], algebras[i + 1], options.limits)
            for i in range(len(documents) - 1)]
    report = Report("compose-stm")
    checked = [morphism(phi, options.limits) for phi in maps]
    for found in checked:
        report.lines.append(found.render())
    if not all(found.record.valid for found in checked):
        report.refuted = True
        report.payload = {"maps": [found.to_dict() for found in checked]}
        return report
    composite = checked[0]
    for found in checked[1:]:
        composite = compose(composite.representative, found.representative, options.limits)
    report.lines += ["composite:", composite.render()]
    report.payload = {"maps": [found.to_dict() for found in checked], "composite": composite.to_dict()}
    return report


def rank0_search(documents: Sequence[InputDocument], options: Options) -> Report:
    document = _single(documents, "search-rank0")
    if document.stm is None or document.stm.d0 is None:
        raise ValidationError(f"search-rank0 needs 'd0' in the [stm] section of {document.source}")
    algebra = algebra_of(document)
    d0 = parse_normalizing(document.stm.d0)
    matches = recipes.search_rank0(algebra, d0, options.limits)
    report = Report("search-rank0", [f"rank 0 morphisms with d0 = {d0.render()} into {algebra.name}: "
                                     f"{len(matches)} orbits"])
    report.lines += [f"  {m.render()}" for m in matches]
    report.payload = {"d0": d0.to_dict(), "matches": [m.to_dict() for m in matches]}
    return report


def order(documents: Sequence[InputDocument], options: Options) -> Report:
    """The first document's map witnesses first ~> second, the second's (if any) the way back"""
    if len(documents) != 2:
        raise ValidationError(f"check-order takes two documents, got {len(documents)}")
    first, second = algebra_of(documents[0]), algebra_of(documents[1])
    witnesses = [build_map(documents[0], first, second, options.limits)]
    if documents[1].stm is not None:
        back = build_map(documents[1], second, first, options.limits)
        if back.source.same_as(second) and back.target.same_as(first):
            witnesses.append(back)
        else:
            logger.info(f"the map of {documents[1].source} does not lead back to {first.name}, "
                        f"checking one direction")
    verdict = check_order_witness(first, second, witnesses, options.limits)
    return Report("check-order", [verdict.render()], verdict.to_dict(), refuted=verdict.verdict == FAIL)


def correspondence(documents: Sequence[InputDocument], options: Options) -> Report:
    found = morphism(_map_from(_pair(documents, "correspondence"), options.limits), options.limits)
    report = Report("correspondence", [found.render()])
    if not found.record.valid:
        report.refuted = True
        report.payload = found.to_dict()
        return report
    v0 = float(options.v0) if options.v0 is not None else None
    table = residual_correspondence(found, v0, options.limits)
    report.lines.append(table.render())
    constants = correspondence_constants(found, options.limits)
    report.lines.append("density ratios:")
    for entry, ratio in constants:
        report.lines.append(f"  dim {entry.coset.dim} {entry.coset.base.render()}: {ratio}")
    links = intertwiners(found)
    report.lines.append(links.render())
    report.payload = {"morphism": found.to_dict(), "correspondence": table.to_dict(),
                      "density_ratios": [{"coset": e.coset.to_dict(), "ratio": str(r)} for e, r in constants],
                      "intertwiners": links.to_dict()}
    try:
        excellent = excellent_subset(found)
    except ValidationError as e:
        report.lines.append(f"excellent subset: not applicable ({e})")
    else:
        report.lines.append(excellent.render())
        report.payload["excellence"] = excellent.to_dict()
    return report


COMMANDS: Dict[str, Callable[[Sequence[InputDocument], Options], Report]] = {
    "residual-points": residual_points,
    "residual-cosets": residual_cosets,
    "mu": mu,
    "fdeg": fdeg,
    "spectral-diagram": spectral,
    "arithmetic-diagram": arithmetic,
    "symmetries": symmetries,
    "verify-stm": verify,
    "compose-stm": compose_chain,
    "search-rank0": rank0_search,
    "check-order": order,
    "correspondence": correspondence,
}


def run(command: str, documents: Sequence[InputDocument], options: Optional[Options] = None) -> Report:
    """
    Raises:
        ValidationError: unknown command, wrong number of documents, v0 <= 1
        ResiduaError: whatever the command raises
    """
    options = options or Options()
    if command not in COMMANDS:
        raise ValidationError(f"unknown command '{command}'")
    if options.v0 is not None and options.v0 <= 1:
        raise ValidationError(f"v0 must exceed 1, got {options.v0}")
    logger.info(f"Running {command} on {len(documents)} document(s)")
    return COMMANDS[command](documents, options)
