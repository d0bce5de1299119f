import itertools

import pytest

from chromatic import families
from chromatic.backend import solve
from chromatic.graph import Graph, gnp_random, verify_coloring
from chromatic.models import (FORMULATIONS, ExtractionError,
                              FixingConflictError, MilpModel, ModelError,
                              apply_clique_fixings, build_ass, build_ass_s,
                              build_formulation, build_pop, build_pop2,
                              build_rep, check_feasible, encode_coloring,
                              extract_coloring, model_stats, objective_value,
                              rv, wv, xv, yv)
from chromatic.oracle import chromatic_number_exact
from chromatic.preprocess import (PreprocessedInstance, greedy_upper_bound,
                                  preprocess_pipeline)


def instance_for(g: Graph, clique, anchor) -> PreprocessedInstance:
    """Hand-built preprocessing result: no reduction, prescribed clique."""
    upper, greedy = greedy_upper_bound(g)
    return PreprocessedInstance(
        reduced=remove_dominated_identity(g), upper_bound=upper,
        greedy_coloring=greedy, clique=tuple(sorted(clique)), anchor=anchor,
        lower_bound=len(clique),
        solved_in_preprocessing=len(clique) == upper)


def remove_dominated_identity(g: Graph):
    from chromatic.preprocess import ReducedInstance
    return ReducedInstance(graph=g, kept=tuple(range(g.n)), restore_stack=(),
                           original_n=g.n)


def optimum(model: MilpModel) -> int:
    result = solve(model, time_limit=60)
    assert result.solved, result
    return result.upper_bound


class TestAssignmentBuilders:
    def test_triangle_counts(self):
        m = build_ass_s(families.complete(3), 3)
        assert len(m.variables) == 12
        assert len(m.constraints) == 12  # 3 assign + 9 edge

    def test_variable_count_formula(self):
        for seed in range(6):
            g = gnp_random(9, 0.5, seed)
            upper, _ = greedy_upper_bound(g)
            m = build_ass_s(g, upper)
            assert len(m.variables) == upper * (g.n + 1)

    def test_single_vertex_shape(self):
        m = build_ass_s(families.empty(1), 1)
        assert len(m.variables) == 2
        assert len(m.constraints) == 1
        # with no edge rows nothing forces w_1, so the bare model bottoms
        # out at 0; the pipeline settles 1-colorable instances before any
        # build, so this degenerate case never reaches a solver in practice
        assert optimum(m) == 0

    def test_ass_adds_symmetry_rows(self):
        m = build_ass(families.complete(3), 3)
        assert len(m.constraints) == 17  # 12 + 3 use + 2 order
        names = {c.name for c in m.constraints}
        assert "use_1" in names and "order_w_2" in names

    def test_ass_optimum_on_odd_cycle(self):
        g = families.cycle(5)
        assert optimum(build_ass(g, 4)) == 3

    def test_bad_bound(self):
        with pytest.raises(ModelError):
            build_ass_s(families.complete(3), 0)


class TestPopBuilder:
    def test_free_variable_count(self):
        for seed in range(6):
            g = gnp_random(8, 0.5, seed)
            upper, _ = greedy_upper_bound(g)
            if upper < 2:
                continue
            m = build_pop(g, upper, anchor=0)
            assert len(m.variables) == (upper - 1) * g.n

    def test_single_edge_optimum(self):
        g = Graph.from_edges(2, [(0, 1)])
        m = build_pop(g, 2, anchor=0)
        assert m.offset == 1
        assert optimum(m) == 2

    def test_odd_cycle_optimum(self):
        assert optimum(build_pop(families.cycle(5), 3, anchor=0)) == 3

    def test_edge_rows_shape(self):
        g = Graph.from_edges(2, [(0, 1)])
        m = build_pop(g, 4, anchor=0)
        rows = {c.name: c for c in m.constraints if c.block == "edge"}
        assert rows["edge_0_1_1"].sense == ">=" and rows["edge_0_1_1"].rhs == 1.0
        assert rows["edge_0_1_2"].sense == "<=" and len(rows["edge_0_1_2"].terms) == 4
        assert rows["edge_0_1_4"].sense == "<=" and rows["edge_0_1_4"].terms == (
            (yv(3, 0), 1.0), (yv(3, 1), 1.0))

    def test_anchor_rows_cover_other_vertices(self):
        g = families.cycle(4)
        m = build_pop(g, 3, anchor=2)
        anchor_rows = [c for c in m.constraints if c.block == "anchor"]
        assert len(anchor_rows) == (3 - 1) * (g.n - 1)

    def test_rejects_unit_bound(self):
        with pytest.raises(ModelError):
            build_pop(families.complete(2), 1, anchor=0)


class TestPop2Builder:
    def test_single_edge_optimum(self):
        g = Graph.from_edges(2, [(0, 1)])
        assert optimum(build_pop2(g, 2, anchor=1)) == 2

    def test_density_accounting(self):
        # textbook-form coefficient counts: 4|E|H for the pure model's edge
        # block vs 2|E|H + 3|V|H for the hybrid's edge plus linking blocks
        g = families.complete(4)
        pop = build_pop(g, 4, anchor=0)
        pop2 = build_pop2(g, 4, anchor=0)
        assert pop.nnz("edge", dense=True) == 4 * 6 * 4 == 96
        assert pop2.nnz("edge", dense=True) + pop2.nnz("link", dense=True) == \
            2 * 6 * 4 + 3 * 4 * 4 == 96

        k10 = families.complete(10)
        pop = build_pop(k10, 10, anchor=0)
        pop2 = build_pop2(k10, 10, anchor=0)
        dense_pop = pop.nnz("edge", dense=True)
        dense_pop2 = pop2.nnz("edge", dense=True) + pop2.nnz("link", dense=True)
        assert dense_pop == 4 * 45 * 10
        assert dense_pop2 == 2 * 45 * 10 + 3 * 10 * 10
        assert dense_pop2 < dense_pop

    def test_dimension_matches_pop_plus_links(self):
        g = gnp_random(7, 0.5, 3)
        upper, _ = greedy_upper_bound(g)
        m = build_pop2(g, upper, anchor=0)
        assert len(m.variables) == (upper - 1) * g.n + upper * g.n
        assert sum(1 for c in m.constraints if c.block == "link") == upper * g.n


class TestRepBuilder:
    def test_two_isolated_vertices_need_one_color(self):
        g = families.empty(2)
        m = build_rep(g)
        assert optimum(m) == 1

    def test_two_isolated_vertices_without_correction_would_be_zero(self):
        g = families.empty(2)
        m = build_rep(g)
        bad_point = {rv(0, 1): 1.0, rv(1, 0): 1.0, rv(0, 0): 0.0, rv(1, 1): 0.0}
        violated = check_feasible(m, bad_point)
        assert violated and all(name.startswith("isolated") for name in violated)

    def test_complete_graph(self):
        m = build_rep(families.complete(4))
        assert set(m.variables) == {rv(u, u) for u in range(4)}
        assert optimum(m) == 4

    def test_reported_variable_count(self):
        c5 = families.cycle(5)
        m = build_rep(c5)
        assert len(c5.non_edges()) == 5
        assert model_stats(m).num_vars == 10  # |non-edges| + |V|, unordered
        assert len(m.variables) == 15  # both orientations plus the diagonal

    def test_optimum_matches_oracle_on_sparse_graphs(self):
        for seed in range(5):
            g = gnp_random(9, 0.2, seed)
            assert optimum(build_rep(g)) == chromatic_number_exact(g).chi


class TestCliqueFixings:
    def test_full_precoloring_on_triangle(self):
        g = families.complete(3)
        inst = instance_for(g, clique=(0, 1, 2), anchor=2)
        m = apply_clique_fixings(build_ass(g, 3), inst)
        expected_ones = {xv(0, 1), xv(1, 2), xv(2, 3), wv(1), wv(2)}
        assert {k for k, v in m.fixings.items() if v == 1} == expected_ones
        zero_x = {k for k, v in m.fixings.items() if v == 0}
        assert len(zero_x) == 6
        assert len(m.fixings) >= 3 * 3  # at least H fixings per clique vertex

    def test_path_pop_fixings(self):
        g = families.path(3)
        inst = instance_for(g, clique=(0, 1), anchor=1)
        m = apply_clique_fixings(build_pop(g, 2, anchor=1), inst)
        # vertex 0 precolored 1, anchor pushed above color 1, and the
        # boundary edge (1,2) touches only the anchor, so no fixing for it
        assert m.fixings == {yv(1, 0): 0, yv(1, 1): 1}

    def test_boundary_fixing_in_assignment_model(self):
        g = families.path(3)
        inst = instance_for(g, clique=(0, 1), anchor=0)
        m = apply_clique_fixings(build_ass(g, 2), inst)
        # vertex 1 is precolored 1; anchor 0 takes color 2; edge (1,2) in
        # the boundary forbids color 1 on vertex 2
        assert m.fixings[xv(2, 1)] == 0

    def test_pop_boundary_equality_row(self):
        g = Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)])
        inst = instance_for(g, clique=(0, 1, 2), anchor=0)
        upper, _ = greedy_upper_bound(g)
        m = apply_clique_fixings(build_pop(g, upper, anchor=0), inst)
        boundary = [c for c in m.constraints if c.block == "boundary"]
        # vertex 3 is adjacent to clique vertex 2 (precolored 2, inside 1..H)
        assert any(c.name == "boundary_2_3" for c in boundary)

    def test_pop2_boundary_fixes_assignment_variable(self):
        g = Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)])
        inst = instance_for(g, clique=(0, 1, 2), anchor=0)
        upper, _ = greedy_upper_bound(g)
        m = apply_clique_fixings(build_pop2(g, upper, anchor=0), inst)
        assert m.fixings[xv(3, 2)] == 0

    def test_rep_fixes_clique_diagonal(self):
        g = families.complete(3)
        inst = instance_for(g, clique=(0, 1, 2), anchor=0)
        m = apply_clique_fixings(build_rep(g), inst)
        assert m.fixings == {rv(0, 0): 1, rv(1, 1): 1, rv(2, 2): 1}

    def test_conflicting_fixing_detected(self):
        g = families.complete(3)
        inst = instance_for(g, clique=(0, 1, 2), anchor=2)
        m = build_ass(g, 3)
        m = apply_clique_fixings(m, inst)
        from dataclasses import replace
        tampered = replace(m, fixings={**m.fixings, xv(0, 1): 0})
        with pytest.raises(FixingConflictError):
            apply_clique_fixings(tampered, inst)

    def test_fixings_preserve_optimum(self):
        for seed in (0, 1):
            g = gnp_random(9, 0.5, seed)
            chi = chromatic_number_exact(g).chi
            inst = preprocess_pipeline(g, seed=seed, clique_time_budget=1)
            for kind in FORMULATIONS:
                if inst.upper_bound < 2 and kind in ("pop", "pop2"):
                    continue
                bare = build_formulation(kind, inst)
                fixed = apply_clique_fixings(bare, inst)
                assert optimum(bare) == optimum(fixed) == chi


class TestExtractColoring:
    def test_pop_two_vertices(self):
        g = Graph.from_edges(2, [(0, 1)])
        m = build_pop(g, 2, anchor=0)
        coloring = extract_coloring(m, {yv(1, 0): 1.0, yv(1, 1): 0.0})
        assert coloring.colors == (2, 1)

    def test_ass_identity(self):
        g = families.complete(3)
        m = build_ass(g, 3)
        values = {xv(v, i): 1.0 if i == v + 1 else 0.0
                  for v in range(3) for i in range(1, 4)}
        values.update({wv(i): 1.0 for i in range(1, 4)})
        assert extract_coloring(m, values).colors == (1, 2, 3)

    def test_rep_two_isolated(self):
        g = families.empty(2)
        m = build_rep(g)
        coloring = extract_coloring(m, {rv(0, 0): 1.0, rv(0, 1): 1.0,
                                        rv(1, 0): 0.0, rv(1, 1): 0.0})
        assert coloring.colors == (1, 1)

    def test_double_assignment_rejected(self):
        g = families.empty(1)
        m = build_ass_s(g, 2)
        with pytest.raises(ExtractionError, match="2 assigned colors"):
            extract_coloring(m, {xv(0, 1): 1.0, xv(0, 2): 1.0})

    def test_fractional_value_rejected(self):
        g = families.empty(1)
        m = build_ass_s(g, 1)
        with pytest.raises(ExtractionError, match="non-binary"):
            extract_coloring(m, {xv(0, 1): 0.4})

    def test_tolerance_rounding(self):
        g = families.empty(1)
        m = build_ass_s(g, 1)
        coloring = extract_coloring(m, {xv(0, 1): 1.0 - 1e-7, wv(1): 1e-7})
        assert coloring.colors == (1,)


class TestEncodeDecode:
    @pytest.mark.parametrize("kind", FORMULATIONS)
    def test_round_trip_through_encoding(self, kind):
        for seed in range(4):
            g = gnp_random(8, 0.5, seed)
            witness = chromatic_number_exact(g).witness
            upper = witness.num_colors
            if kind in ("pop", "pop2") and upper < 2:
                continue
            inst = instance_for(g, clique=(0,), anchor=0)
            if kind == "pop" or kind == "pop2":
                # anchor must sit at the top color for the ordering models
                top = max(witness.colors)
                anchor = witness.colors.index(top)
                model = (build_pop if kind == "pop" else build_pop2)(g, upper, anchor)
            elif kind == "rep":
                model = build_rep(g)
            else:
                model = (build_ass_s if kind == "ass-s" else build_ass)(g, upper)
            values = encode_coloring(model, witness)
            assert check_feasible(model, values) == []
            decoded = extract_coloring(model, values)
            if kind == "rep":
                # classes are preserved; labels are canonicalized
                partition = {}
                for v, color in enumerate(decoded.colors):
                    partition.setdefault(color, set()).add(v)
                original = {}
                for v, color in enumerate(witness.colors):
                    original.setdefault(color, set()).add(v)
                assert sorted(map(sorted, partition.values())) == \
                    sorted(map(sorted, original.values()))
            else:
                assert decoded == witness
            assert objective_value(model, values) == witness.num_colors

    @pytest.mark.parametrize("graph,upper", [
        (families.path(3), 3), (families.complete(3), 3), (families.cycle(4), 2),
    ])
    def test_every_feasible_pop_point_decodes_uniquely(self, graph, upper):
        # exhaustive over all 0/1 assignments: feasibility alone forces a
        # monotone chain with exactly one step per vertex, i.e. a proper
        # coloring; this is the unambiguity argument behind the formulation
        model = build_pop(graph, upper, anchor=0)
        nvars = len(model.variables)
        feasible_count = 0
        for mask in range(2 ** nvars):
            values = {name: float((mask >> j) & 1)
                      for j, name in enumerate(model.variables)}
            if check_feasible(model, values):
                continue
            feasible_count += 1
            coloring = extract_coloring(model, values)  # unique step or raises
            assert verify_coloring(graph, coloring).valid
            for v in range(graph.n):
                chain = [values[yv(i, v)] for i in range(1, upper)]
                assert all(a >= b for a, b in zip(chain, chain[1:]))
        assert feasible_count > 0

    def test_pop_monotone_chain_in_feasible_solutions(self):
        g = gnp_random(8, 0.5, 1)
        chi = chromatic_number_exact(g)
        top = max(chi.witness.colors)
        anchor = chi.witness.colors.index(top)
        model = build_pop(g, chi.witness.num_colors, anchor)
        values = encode_coloring(model, chi.witness)
        for v in range(g.n):
            chain = [values[yv(i, v)] for i in range(1, chi.witness.num_colors)]
            assert all(a >= b for a, b in zip(chain, chain[1:]))


class TestFormulationEquivalence:
    def test_all_formulations_match_oracle(self):
        graphs = [gnp_random(9, p, seed)
                  for seed, p in itertools.product(range(3), (0.3, 0.6))]
        graphs.append(gnp_random(12, 0.5, 3))
        for g in graphs:
            chi = chromatic_number_exact(g).chi
            inst = preprocess_pipeline(g, seed=1, clique_time_budget=1)
            if inst.upper_bound < 2:
                assert chi == 1
                continue
            for kind in FORMULATIONS:
                model = apply_clique_fixings(build_formulation(kind, inst), inst)
                result = solve(model, time_limit=60)
                assert result.solved and result.upper_bound == chi, (kind, g.n, g.m)
                coloring = extract_coloring(model, result.values)
                report = verify_coloring(inst.reduced.graph, coloring)
                assert report.valid and report.colors_used == result.upper_bound

    def test_assignment_model_on_mid_size_benchmark_family(self):
        g = families.full_insertion(3, 3)  # 80 vertices, 346 edges, chi = 6
        inst = preprocess_pipeline(g, seed=0, clique_time_budget=1)
        model = apply_clique_fixings(build_formulation("ass", inst), inst)
        result = solve(model, time_limit=120)
        assert result.solved and result.upper_bound == 6


class TestWeaknessPoints:
    def test_assignment_point_value_two(self):
        for seed in (0, 1, 2):
            g = gnp_random(10, 0.5, seed)
            upper, _ = greedy_upper_bound(g)
            m = build_ass(g, upper)
            point = {}
            for v in range(g.n):
                point[xv(v, 1)] = point[xv(v, 2)] = 0.5
                for i in range(3, upper + 1):
                    point[xv(v, i)] = 0.0
            point[wv(1)] = point[wv(2)] = 1.0
            for i in range(3, upper + 1):
                point[wv(i)] = 0.0
            assert check_feasible(m, point, tol=1e-9) == []
            assert objective_value(m, point) == 2.0

    def test_ordering_point_value_one_and_a_half(self):
        # feasible for every color bound >= 2, including the H=2 edge case
        cases = [(gnp_random(10, 0.5, s), None) for s in (0, 1, 2)]
        cases.append((Graph.from_edges(2, [(0, 1)]), 2))
        for g, forced_upper in cases:
            upper = forced_upper or greedy_upper_bound(g)[0]
            m = build_pop(g, upper, anchor=0)
            point = {yv(1, v): 0.5 for v in range(g.n)}
            for v in range(g.n):
                for i in range(2, upper):
                    point[yv(i, v)] = 0.0
            assert check_feasible(m, point, tol=1e-9) == []
            assert objective_value(m, point) == 1.5


class TestModelStats:
    def test_pop_stats_subtract_fixings(self):
        g = gnp_random(10, 0.5, 4)
        inst = preprocess_pipeline(g, seed=4, clique_time_budget=1)
        upper = inst.upper_bound
        if upper < 2:
            pytest.skip("degenerate instance")
        m = build_formulation("pop", inst)
        assert model_stats(m).num_vars == (upper - 1) * inst.reduced.graph.n
        fixed = apply_clique_fixings(m, inst)
        assert model_stats(fixed).num_vars == \
            (upper - 1) * inst.reduced.graph.n - len(fixed.fixings)

    def test_ass_s_triangle(self):
        stats = model_stats(build_ass_s(families.complete(3), 3))
        assert stats.num_vars == 12 and stats.num_constraints == 12

    def test_nonzeros_counted(self):
        m = build_ass_s(families.complete(3), 2)
        # 3 assign rows of 2 terms + 6 edge rows of 3 terms
        assert model_stats(m).num_nonzeros == 3 * 2 + 6 * 3
