"""Reference values and brute-force oracles shared by the tests.

The channel constants were evaluated with mpmath at 30 digits straight from
the link formula, independently of d2dsim.channel.
"""

SNR_UE_BS_500M = 14.742744288145981
SNR_D2D_50M = 3.694437612925077
RATE_UE_BS_500M = 3.976615149442797

import math

from d2dsim.core import Mode

BRANCH_ORDER = ("client", "promote", "demote", "adopt", "relay_under_mhr")


def brute_force_candidates(ue_id, ue_pos, ue_battery, self_wdr, adverts, params, link=None):
    """Feasible (score, distance, id) triples per predicate, by enumeration.

    A direct transcription of the five candidate conditions, with the
    distance bands read as near (<= cluster radius), mid (cluster radius to
    relay query distance) and far (query distance to multi-hop distance).
    ``link(tx, rx)`` is the precalculated link rate; None judges advertised
    WDR alone.
    """
    p = params
    up = self_wdr + p.perc_data_rate * self_wdr
    down = self_wdr - p.perc_data_rate * self_wdr

    def batt(b):
        return (not p.battery_option_enabled) or b >= p.battery_threshold

    out = {name: [] for name in BRANCH_ORDER}
    for a in adverts:
        # hypot, not sqrt of squares: the two can differ by an ulp at a band edge
        d = math.hypot(ue_pos[0] - a.pos[0], ue_pos[1] - a.pos[1])
        via = a.wdr if (link is None or not p.path_aware) else min(a.wdr, link(ue_id, a.id))
        if (a.mode is Mode.D2D_RELAY and d <= p.max_distance_form_cluster
                and a.wdr >= up and via >= up and a.served_count <= p.d_serving_cap - 1):
            out["client"].append((via, d, a.id))
        if (a.mode is Mode.D2D_MHR and d <= p.max_distance_form_cluster
                and a.wdr >= up and via >= up and a.served_count == 0):
            out["promote"].append((via, d, a.id))
        if (a.mode is Mode.D2D_RELAY
                and p.max_distance_form_cluster <= d <= p.max_query_d2dr_distance
                and a.wdr >= up and via >= up and a.served_count == 0 and batt(a.battery)):
            out["demote"].append((via, d, a.id))
        if (a.mode is Mode.D2D_RELAY
                and p.max_distance_form_cluster <= d <= p.max_query_d2dr_distance
                and a.wdr <= down and batt(a.battery) and batt(ue_battery)):
            if link is None or not p.path_aware:
                ok = True
            else:
                via_ue = min(self_wdr, link(a.id, ue_id))
                ok = a.wdr <= via_ue - p.perc_data_rate * via_ue
            if ok:
                out["adopt"].append((a.wdr, d, a.id))
        if (a.mode is Mode.D2D_MHR
                and p.max_query_d2dr_distance <= d <= p.max_distance_multihop
                and a.wdr >= up and via >= up and a.served_count == 0 and batt(a.battery)):
            out["relay_under_mhr"].append((via, d, a.id))
    return out


def brute_force_argmax(triples):
    if not triples:
        return None
    top = max(t[0] for t in triples)
    best = [t for t in triples if t[0] == top]
    return sorted(best, key=lambda t: (t[1], t[2]))[0][2]


def brute_force_branch(cands):
    """Index (1..5) and target of the first satisfied predicate, else (6, None)."""
    for i, name in enumerate(BRANCH_ORDER, start=1):
        target = brute_force_argmax(cands[name])
        if target is not None:
            return i, target
    return 6, None
