"""Per-frame orchestration of the three experts: edge suppression and
grouping, edge/circle classification and estimation, square layering,
ignorance-region management and dimensionality accounting."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import circle_expert as ce
from . import line_expert as le
from . import square_expert as se
from .core import (Circle, FilterConfig, FilterState, IgnoranceRegion,
                   ImuSample, NormalEdge, PixelPoint, RebelEdge, Square,
                   trust_commit, trust_init, wrap_deg)
from .kinematics import angle_of, predict_normal_edge, rotate_motion_field

# how many angle-neighbors each observation is checked against
_K_NEIGHBORS = 8

# priority when one observation classifies differently against several
# candidate edges (lower is better)
_XI_PRIORITY = {ce.XiClass.XI2: 0, ce.XiClass.XI3: 1, ce.XiClass.XI1: 2,
                ce.XiClass.XI4: 3, ce.XiClass.XI5: 4}


@dataclass
class DimensionalityReport:
    chi: int = 0
    e_n: int = 0
    e_r: int = 0
    c_n: int = 0
    c_r: int = 0
    s: int = 0
    psi: int = 0
    alpha: int = 0
    comparisons: int = 0  # instrumented circle-expert comparison count

    @property
    def total(self) -> int:
        return (self.chi + self.e_n + self.e_r + self.c_n + self.c_r
                + self.s + self.psi + self.alpha)


def dimensionality(state: FilterState) -> DimensionalityReport:
    return DimensionalityReport(
        chi=len(state.chi), e_n=len(state.normal_edges),
        e_r=len(state.rebel_edges), c_n=len(state.normal_circles),
        c_r=len(state.rebel_circles), s=len(state.squares),
        psi=len(state.psi), alpha=len(state.alpha))


def baseline_store(mode: str, frames: Iterable[Union[int, Sequence]],
                   k: int = 5) -> List[int]:
    """Reference memory baselines: running total of raw edge counts, or the
    sum over the trailing k frames."""
    counts = [f if isinstance(f, int) else len(f) for f in frames]
    if mode == "accumulative":
        out, total = [], 0
        for c in counts:
            total += c
            out.append(total)
        return out
    if mode == "last_k":
        if k < 1:
            raise ValueError("k must be >= 1")
        return [sum(counts[max(0, i - k + 1):i + 1]) for i in range(len(counts))]
    raise ValueError(f"unknown baseline mode: {mode}")


def _predict_rebel_edge(e: RebelEdge, imu: ImuSample,
                        config: FilterConfig) -> RebelEdge:
    """Rebels advance along their own direction after the rotational update."""
    cam = config.camera
    rotated = rotate_motion_field(e.loc - cam.principal, cam, imu.omega,
                                  verbatim=config.use_verbatim_eq1)
    step = e.vel * imu.t_f * config.px_per_cm
    rad = math.radians(e.beta)
    return replace(e, loc=PixelPoint(rotated.x + step * math.cos(rad),
                                     rotated.y + step * math.sin(rad)))


def _predict_circle(c: Circle, imu: ImuSample, config: FilterConfig) -> Circle:
    """Advance a circle one frame; normal circles follow the outward field
    (velocity re-based on the vehicle speed), rebels follow their own angle."""
    cam = config.camera
    rotated = rotate_motion_field(c.loc - cam.principal, cam, imu.omega,
                                  verbatim=config.use_verbatim_eq1)
    if c.kind == "normal":
        vel = imu.v_v
        rel = c.loc - cam.principal
        r = rel.norm()
        if r == 0.0:
            return replace(c, loc=rotated, vel=vel)
        step = vel * imu.t_f * config.px_per_cm
        unit = rel.scaled(1.0 / r)
        return replace(c, loc=rotated + unit.scaled(step), vel=vel)
    step = c.vel * imu.t_f * config.px_per_cm
    rad = math.radians(c.beta)
    return replace(c, loc=PixelPoint(rotated.x + step * math.cos(rad),
                                     rotated.y + step * math.sin(rad)))


def _angle_neighbors(sorted_betas: List[float], obs_beta: float,
                     n: int) -> List[int]:
    """Indices (into the sorted order) of up to _K_NEIGHBORS circularly
    nearest entries by angle."""
    k = min(_K_NEIGHBORS, n)
    pos = bisect.bisect_left(sorted_betas, obs_beta)
    picked = []
    lo, hi = pos - 1, pos
    while len(picked) < k:
        if lo < 0 and hi >= n:
            break
        if hi >= n:
            picked.append(lo % n)
            lo -= 1
        elif lo < 0:
            picked.append(hi % n)
            hi += 1
        else:
            d_lo = abs(wrap_deg(sorted_betas[lo] - obs_beta))
            d_hi = abs(wrap_deg(sorted_betas[hi] - obs_beta))
            if d_lo <= d_hi:
                picked.append(lo)
                lo -= 1
            else:
                picked.append(hi)
                hi += 1
    # circular wrap: also consider the extreme entries across the seam
    if n > k:
        for idx in (0, n - 1):
            if idx not in picked:
                if abs(wrap_deg(sorted_betas[idx] - obs_beta)) < max(
                        abs(wrap_deg(sorted_betas[i] - obs_beta)) for i in picked):
                    picked.append(idx)
    return picked


class SequencingError(RuntimeError):
    """Raised when frames are presented out of order."""


def step(state: FilterState, frame: Sequence[PixelPoint], imu: ImuSample,
         config: FilterConfig,
         frame_index: Optional[int] = None) -> Tuple[FilterState, DimensionalityReport]:
    """Run one full frame through the filter and return the new state plus a
    dimensionality report."""
    if frame_index is None:
        frame_index = state.frame_index + 1
    if frame_index <= state.frame_index:
        raise SequencingError(
            f"frame {frame_index} not after {state.frame_index}")
    cam = config.camera
    origin = cam.principal
    ladder = config.circle_trust
    comparisons = 0

    # (a) age ignorance regions
    psi: List[IgnoranceRegion] = []
    for r in state.psi:
        aged = replace(r, remaining_frames=r.remaining_frames - 1)
        if aged.remaining_frames >= 0:
            psi.append(aged)

    # (b) line expert
    kept, _dropped = le.apply_ignorance(frame, psi)
    chi, collectors = le.group_edges(kept, config.mu_0)

    # (c) circle expert: edge stage -------------------------------------
    predicted_n = [predict_normal_edge(e, imu, config) for e in state.normal_edges]
    predicted_r = [_predict_rebel_edge(e, imu, config) for e in state.rebel_edges]

    assignments: Dict[int, List[Tuple[ce.XiClass, PixelPoint, int, float]]] = {}
    xi1_obs: List[Tuple[PixelPoint, int]] = []
    rebel_candidates: List[PixelPoint] = []
    fresh_obs: List[Tuple[PixelPoint, int]] = []

    if predicted_n:
        order = sorted(range(len(predicted_n)), key=lambda i: (predicted_n[i].beta, i))
        sorted_betas = [predicted_n[i].beta for i in order]
        n_edges = len(order)
        log_n = max(1, math.ceil(math.log2(n_edges + 1)))
        for obs, count in chi:
            obs_beta = angle_of(obs, origin)
            comparisons += log_n
            best = None  # (priority, dist, edge_idx, cls)
            for sp in _angle_neighbors(sorted_betas, obs_beta, n_edges):
                idx = order[sp]
                cls = ce.classify_edge(obs, predicted_n[idx], config, imu)
                comparisons += 1
                key = (_XI_PRIORITY[cls], obs.dist(predicted_n[idx].loc), idx)
                if best is None or key < best[0]:
                    best = (key, idx, cls)
            (_prio, dist, _), idx, cls = best
            if cls in (ce.XiClass.XI2, ce.XiClass.XI3):
                assignments.setdefault(idx, []).append((cls, obs, count, dist))
            elif cls is ce.XiClass.XI1:
                assignments.setdefault(idx, []).append((cls, obs, count, dist))
                xi1_obs.append((obs, count))
            else:  # XI4 / XI5
                assignments.setdefault(idx, []).append((cls, obs, count, dist))
                rebel_candidates.append(obs)
    else:
        fresh_obs = list(chi)

    # rebel-edge matching consumes candidates before the alignment matrix
    rebel_obs: Dict[int, List[Tuple[PixelPoint, float]]] = {}
    alpha_candidates: List[PixelPoint] = []
    gate = config.eps_v_r * imu.v_v * config.px_per_cm * imu.t_f
    for obs in rebel_candidates:
        best = None
        for j, pr in enumerate(predicted_r):
            comparisons += 1
            if obs.dist(pr.loc) > gate:
                continue
            ang_err = abs(wrap_deg(angle_of(obs, pr.origin) - pr.beta))
            if ang_err <= config.delta_v + pr.mu:
                d = obs.dist(pr.loc)
                if best is None or d < best[0]:
                    best = (d, j)
        if best is None:
            alpha_candidates.append(obs)
        else:
            rebel_obs.setdefault(best[1], []).append((obs, best[0]))

    # commit normal edges
    normal_edges: List[NormalEdge] = []
    for idx, pred in enumerate(predicted_n):
        assigned = assignments.get(idx, [])
        xi2 = sorted([a for a in assigned if a[0] is ce.XiClass.XI2],
                     key=lambda a: a[3])
        xi3 = sorted([a for a in assigned if a[0] is ce.XiClass.XI3],
                     key=lambda a: a[3])
        if xi2 or xi3:
            chosen = (xi2 or xi3)[0]
            match_count = max(1, sum(a[2] for a in xi2 + xi3))
            est = ce.estimate_normal_edge(pred, chosen[1], match_count, imu, config)
            delta = 1 if xi2 else -1
        else:
            est = pred
            delta = -1
        new_trust = trust_commit(est.trust, delta, ladder)
        if new_trust is not None:
            normal_edges.append(replace(est, trust=new_trust))
    for obs, _count in xi1_obs + fresh_obs:
        normal_edges.append(NormalEdge(
            loc=obs, vel=imu.v_v, beta=angle_of(obs, origin), mu=config.mu_0,
            trust=trust_init("normal_edge", ladder)))

    # commit rebel edges
    rebel_edges: List[RebelEdge] = []
    for j, pred in enumerate(predicted_r):
        hits = sorted(rebel_obs.get(j, []), key=lambda h: h[1])
        if hits:
            est = ce.estimate_rebel_edge(pred, hits[0][0], imu, config)
            delta = 1
        else:
            est = pred
            delta = -1
        new_trust = trust_commit(est.trust, delta, ladder)
        if new_trust is not None:
            rebel_edges.append(replace(est, trust=new_trust))

    # alignment matrix
    alpha, new_rebels, recycled = ce.update_rebel_alignment(
        state.alpha, alpha_candidates, frame_index, config, imu)
    rebel_edges.extend(new_rebels)
    for p in recycled:
        normal_edges.append(NormalEdge(
            loc=p, vel=imu.v_v, beta=angle_of(p, origin), mu=config.mu_0,
            trust=trust_init("normal_edge", ladder)))

    # (d) circle expert: circling stage ---------------------------------
    normal_circles, n_comp = _circle_stage_normal(
        normal_edges, state.normal_circles, imu, config)
    comparisons += n_comp
    rebel_circles, r_comp = _circle_stage_rebel(
        rebel_edges, state.rebel_circles, imu, config)
    comparisons += r_comp
    for c in normal_circles + rebel_circles:
        if c.trust == ladder.tr_m:
            psi.append(IgnoranceRegion(loc=c.loc, extent=(c.radius,), ty=1,
                                       remaining_frames=config.psi_lifetime))

    # (e) square expert -------------------------------------------------
    squares = _square_stage(normal_circles + rebel_circles, state.squares,
                            imu, config)
    for s in squares:
        if s.trust == config.square_trust.tr_m:
            psi.append(IgnoranceRegion(loc=s.loc, extent=s.radii, ty=2,
                                       remaining_frames=config.psi_lifetime))

    new_state = FilterState(
        frame_index=frame_index, chi=chi, collectors=collectors, psi=psi,
        alpha=alpha, normal_edges=normal_edges, rebel_edges=rebel_edges,
        normal_circles=normal_circles, rebel_circles=rebel_circles,
        squares=squares)
    report = dimensionality(new_state)
    report.comparisons = comparisons
    return new_state, report


def _circle_stage_normal(edges: List[NormalEdge], prev_circles: List[Circle],
                         imu: ImuSample,
                         config: FilterConfig) -> Tuple[List[Circle], int]:
    comparisons = 0
    ladder = config.circle_trust
    # group edges into mean circles, sweeping in sorted angle order
    order = sorted(range(len(edges)), key=lambda i: (edges[i].beta, i))
    assigned = [False] * len(edges)
    mean_circles: List[Tuple[Circle, List[PixelPoint]]] = []
    for si in order:
        if assigned[si]:
            continue
        seed = edges[si]
        window = [i for i in order
                  if not assigned[i]
                  and abs(wrap_deg(edges[i].beta - seed.beta)) < config.eps_beta_n]
        subpool = [edges[i] for i in window]
        comparisons += len(subpool)
        circle = ce.group_normal_circle(seed, subpool, config, imu)
        member_global = [window[m] for m in circle.members]
        for g in member_global:
            assigned[g] = True
        circle.members = member_global
        mean_circles.append((circle, [edges[g].loc for g in member_global]))

    predicted = [_predict_circle(c, imu, config) for c in prev_circles]
    consumed = [False] * len(predicted)
    out: List[Circle] = []
    for mean, member_locs in mean_circles:
        match = None
        for j, pred in enumerate(predicted):
            if consumed[j]:
                continue
            comparisons += 1
            if ce.match_normal_circle(pred, mean, member_locs, config):
                match = j
                break
        if match is None:
            out.append(mean)
            continue
        consumed[match] = True
        pred = predicted[match]
        tr_c = ladder.tr_c
        loc = ce.estimate_trusted(pred.loc, mean.loc, pred.trust, tr_c)
        radius = ce.estimate_trusted(pred.radius, mean.radius, pred.trust, tr_c)
        vel = ce.estimate_trusted(pred.vel, mean.vel, pred.trust, tr_c)
        beta = ce.estimate_trusted_angle(pred.beta, mean.beta, pred.trust, tr_c)
        delta = 1 if abs(wrap_deg(mean.beta - pred.beta)) < config.eps_beta_n else -1
        new_trust = trust_commit(pred.trust, delta, ladder)
        if new_trust is not None:
            out.append(replace(pred, loc=loc, radius=radius, vel=vel, beta=beta,
                               trust=new_trust, members=mean.members))
    for j, pred in enumerate(predicted):
        if consumed[j]:
            continue
        new_trust = trust_commit(pred.trust, -1, ladder)
        if new_trust is not None:
            out.append(replace(pred, trust=new_trust))
    return out, comparisons


def _circle_stage_rebel(edges: List[RebelEdge], prev_circles: List[Circle],
                        imu: ImuSample,
                        config: FilterConfig) -> Tuple[List[Circle], int]:
    comparisons = 0
    ladder = config.circle_trust
    assigned = [False] * len(edges)
    mean_circles: List[Tuple[Circle, List[PixelPoint]]] = []
    for si in range(len(edges)):
        if assigned[si]:
            continue
        seed = edges[si]
        window = [i for i in range(len(edges)) if not assigned[i]]
        subpool = [edges[i] for i in window]
        comparisons += len(subpool)
        circle, _ = ce.group_and_match_rebel_circle(seed, subpool, None,
                                                    config, imu)
        member_global = [window[m] for m in circle.members]
        for g in member_global:
            assigned[g] = True
        circle.members = member_global
        mean_circles.append((circle, [edges[g].loc for g in member_global]))

    predicted = [_predict_circle(c, imu, config) for c in prev_circles]
    consumed = [False] * len(predicted)
    out: List[Circle] = []
    for mean, member_locs in mean_circles:
        match = None
        for j, pred in enumerate(predicted):
            if consumed[j]:
                continue
            comparisons += 1
            if (abs(wrap_deg(mean.beta - pred.beta)) < config.eps_beta_r
                    and mean.vel <= pred.vel + config.eps_v_r * imu.v_v
                    and ce.circle_overlap_percentage(member_locs, pred)
                    >= config.rho_c):
                match = j
                break
        if match is None:
            out.append(mean)
            continue
        consumed[match] = True
        pred = predicted[match]
        tr_c = ladder.tr_c
        loc = ce.estimate_trusted(pred.loc, mean.loc, pred.trust, tr_c)
        radius = ce.estimate_trusted(pred.radius, mean.radius, pred.trust, tr_c)
        vel = ce.estimate_trusted(pred.vel, mean.vel, pred.trust, tr_c)
        beta = ce.estimate_trusted_angle(pred.beta, mean.beta, pred.trust, tr_c)
        delta = 1 if abs(wrap_deg(mean.beta - pred.beta)) < config.eps_beta_r else -1
        new_trust = trust_commit(pred.trust, delta, ladder)
        if new_trust is not None:
            out.append(replace(pred, loc=loc, radius=radius, vel=vel, beta=beta,
                               trust=new_trust, members=mean.members))
    for j, pred in enumerate(predicted):
        if consumed[j]:
            continue
        new_trust = trust_commit(pred.trust, -1, ladder)
        if new_trust is not None:
            out.append(replace(pred, trust=new_trust))
    return out, comparisons


def _square_stage(circles: List[Circle], prev_squares: List[Square],
                  imu: ImuSample, config: FilterConfig) -> List[Square]:
    cam = config.camera
    ladder = config.square_trust
    d_t0 = math.hypot(cam.width, cam.height)
    used = [False] * len(circles)
    mean_squares: List[Square] = []
    for ai, a in enumerate(circles):
        if used[ai]:
            continue
        d_t = d_t0
        # look for the furthest admissible couple first
        candidates = sorted(
            (bi for bi in range(len(circles)) if bi != ai and not used[bi]),
            key=lambda bi: (-a.loc.dist(circles[bi].loc), bi))
        couple = None
        for bi in candidates:
            b = circles[bi]
            if not se.match_couple_case1(a, b, d_t, config):
                continue
            for ci in range(len(circles)):
                if ci in (ai, bi):
                    continue
                d_t = se.shrink_dt(a, b, circles[ci], d_t)
            if a.loc.dist(b.loc) < d_t:
                couple = bi
                break
        if couple is None:
            continue
        used[ai] = True
        used[couple] = True
        group = [couple]
        for ci in range(len(circles)):
            if used[ci] or ci == ai:
                continue
            if se.match_case2(a, circles[ci], config):
                group.append(ci)
                used[ci] = True
        square = se.build_mean_square(a, [circles[g] for g in group], config)
        for ci in range(len(circles)):
            if used[ci] or ci == ai:
                continue
            if se.include_minor_circle(square, circles[ci], config):
                group.append(ci)
                used[ci] = True
        mean_squares.append(se.build_mean_square(a, [circles[g] for g in group],
                                                 config))

    predicted = [se.predict_square(replace(s, vel=imu.v_v), imu, config)
                 for s in prev_squares]
    consumed = [False] * len(predicted)
    out: List[Square] = []
    for mean in mean_squares:
        match = None
        for j, pred in enumerate(predicted):
            if consumed[j]:
                continue
            if se.match_square(pred, mean, config, imu.v_v):
                match = j
                break
        if match is None:
            out.append(mean)
            continue
        consumed[match] = True
        est = se.estimate_square(predicted[match], mean, ladder, config)
        if est.trust >= ladder.tr_c:
            out.append(replace(est, trust=min(est.trust, ladder.tr_m)))
    for j, pred in enumerate(predicted):
        if consumed[j]:
            continue
        new_trust = trust_commit(pred.trust, -1, ladder)
        if new_trust is not None:
            out.append(replace(pred, trust=new_trust))
    return out
