#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "recast/cv_tune.hpp"
#include "recast/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

using namespace recast;

namespace {

// Time-ordered sample with one strongly predictive column and one noise
// column, both standardized.
struct CvFixture {
    Matrix x;
    std::vector<double> labels;
};

CvFixture make_cv_fixture(std::size_t rows, unsigned seed = 7, double noise_scale = 1.1) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0, 1);
    CvFixture f;
    f.x = Matrix(rows, 3);
    for (std::size_t r = 0; r < rows; ++r) {
        double state = (r / 17) % 4 == 0 ? 1.0 : 0.0;   // persistent blocks of positives
        f.labels.push_back(unif(gen) < (state == 1.0 ? 0.85 : 0.1) ? 1.0 : 0.0);
        f.x.at(r, 0) = 1.0;
        f.x.at(r, 1) = 2.0 * f.labels[r] - 1.0 + noise_scale * noise(gen);
        f.x.at(r, 2) = noise(gen);
    }
    for (std::size_t c = 1; c < 3; ++c) {
        double mean = 0, ss = 0;
        for (std::size_t r = 0; r < rows; ++r) mean += f.x.at(r, c);
        mean /= rows;
        for (std::size_t r = 0; r < rows; ++r) ss += (f.x.at(r, c) - mean) * (f.x.at(r, c) - mean);
        double sd = std::sqrt(ss / rows);
        for (std::size_t r = 0; r < rows; ++r) f.x.at(r, c) = (f.x.at(r, c) - mean) / sd;
    }
    return f;
}

} // namespace

TEST_CASE("block plans") {
    SUBCASE("one block when the sample just fits") {
        BlockPlan p = make_blocks(288);
        REQUIRE(p.blocks.size() == 1);
        CHECK(p.blocks[0].start == 0);
        CHECK(p.blocks[0].train_end == 240);
        CHECK(p.blocks[0].end == 288);
    }
    SUBCASE("T=432 with step 12 gives 13 overlapping blocks") {
        BlockPlan p = make_blocks(432);
        REQUIRE(p.blocks.size() == 13);
        CHECK(p.blocks.back().start == 144);
        CHECK(p.blocks.back().end == 432);
    }
    SUBCASE("insufficient history is an error") {
        CHECK_THROWS_AS(make_blocks(287), ValidationError);
    }
    SUBCASE("validation always sits strictly after training") {
        std::mt19937 gen(3);
        std::uniform_int_distribution<std::size_t> t_dist(288, 900);
        for (int trial = 0; trial < 30; ++trial) {
            BlockPlan p = make_blocks(t_dist(gen));
            for (const auto& b : p.blocks) {
                CHECK(b.start < b.train_end);
                CHECK(b.train_end < b.end);
            }
        }
    }
    SUBCASE("custom block geometry") {
        BlockPlan p = make_blocks(100, {.block_len = 40, .step = 10, .train_fraction = 0.75});
        REQUIRE(p.blocks.size() == 7);
        CHECK(p.blocks[0].train_end == 30);
    }
}

TEST_CASE("cost-sensitive threshold optimization") {
    SUBCASE("perfect separation: zero cost at the separating midpoint") {
        std::vector<double> p{0.2, 0.4, 0.6, 0.8};
        std::vector<double> y{0, 0, 1, 1};
        ThresholdResult r = optimal_threshold(p, y, {3.0, 1.0});
        CHECK(r.threshold == doctest::Approx(0.5));
        CHECK(r.cost == 0.0);
    }
    SUBCASE("matches a dense uniform grid on lattice fixtures") {
        std::mt19937 gen(13);
        std::uniform_int_distribution<int> lattice(0, 1000);
        std::uniform_real_distribution<double> unif(0, 1);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<double> p, y;
            bool pos = false, neg = false;
            int n = 10 + trial;
            for (int i = 0; i < n; ++i) {
                p.push_back(lattice(gen) / 1000.0);
                y.push_back(unif(gen) < 0.35 ? 1.0 : 0.0);
                (y.back() == 1.0 ? pos : neg) = true;
            }
            if (!pos || !neg) continue;
            CostSpec costs{2.7, 0.9};
            ThresholdResult r = optimal_threshold(p, y, costs);

            double grid_min = std::numeric_limits<double>::infinity();
            for (int g = 0; g <= 10000; ++g) {
                double c = g / 10000.0;
                double cost = 0;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    bool call = p[i] >= c;
                    if (y[i] == 1.0 && !call) cost += costs.cost_fn;
                    if (y[i] == 0.0 && call) cost += costs.cost_fp;
                }
                grid_min = std::min(grid_min, cost);
            }
            CHECK(r.cost == grid_min);
        }
    }
    SUBCASE("scaling both costs leaves the argmin unchanged") {
        std::vector<double> p{0.1, 0.35, 0.42, 0.55, 0.63, 0.8, 0.85};
        std::vector<double> y{0, 1, 0, 1, 0, 1, 1};
        ThresholdResult a = optimal_threshold(p, y, {1.5, 0.5});
        ThresholdResult b = optimal_threshold(p, y, {1.5 * 7, 0.5 * 7});
        CHECK(a.threshold == b.threshold);
        CHECK(b.cost == doctest::Approx(7.0 * a.cost));
    }
    SUBCASE("ties break toward the smallest cutpoint") {
        std::vector<double> p{0.3, 0.7};
        std::vector<double> y{1, 1};
        // All-positive labels are rejected instead of silently optimized.
        CHECK_THROWS_AS(optimal_threshold(p, y, {1, 1}), ValidationError);

        std::vector<double> p2{0.2, 0.8};
        std::vector<double> y2{0, 1};
        ThresholdResult r = optimal_threshold(p2, y2, {1.0, 1.0});
        CHECK(r.cost == 0.0);
        CHECK(r.threshold == doctest::Approx(0.5));
    }
}

TEST_CASE("costs default to the sample class weights") {
    std::vector<double> labels;
    for (int i = 0; i < 20; ++i) labels.push_back(1.0);
    for (int i = 0; i < 160; ++i) labels.push_back(0.0);
    CostSpec c = costs_from_labels(labels);
    CHECK(c.cost_fn == doctest::Approx(0.025));
    CHECK(c.cost_fp == doctest::Approx(0.003125));
    CHECK(c.cost_fn >= c.cost_fp);
}

TEST_CASE("penalty grids") {
    GridConfig cfg;
    SUBCASE("ridge grid is 1000 points log-spaced over 1e-5..1e2") {
        auto grid = penalty_grid(ModelFamily::ridge, cfg);
        REQUIRE(grid.size() == 1000);
        CHECK(grid.front().lambda == doctest::Approx(1e-5));
        CHECK(grid.back().lambda == doctest::Approx(1e2));
        CHECK(grid.front().alpha == 0.0);
        double ratio = grid[1].lambda / grid[0].lambda;
        for (std::size_t i = 2; i < 20; ++i)
            CHECK(grid[i].lambda / grid[i - 1].lambda == doctest::Approx(ratio).epsilon(1e-9));
    }
    SUBCASE("elastic-net grid crosses three alphas with 200 lambdas each") {
        auto grid = penalty_grid(ModelFamily::elastic_net, cfg);
        REQUIRE(grid.size() == 600);
        CHECK(grid[0].alpha == 0.25);
        CHECK(grid[200].alpha == 0.5);
        CHECK(grid[400].alpha == 0.75);
    }
    SUBCASE("plain logits have the single unpenalized candidate") {
        auto grid = penalty_grid(ModelFamily::logit, cfg);
        REQUIRE(grid.size() == 1);
        CHECK(grid[0].lambda == 0.0);
    }
}

TEST_CASE("grid search over blocked folds") {
    CvFixture f = make_cv_fixture(200);
    BlockConfig bc{.block_len = 100, .step = 20, .train_fraction = 0.75};
    BlockPlan plan = make_blocks(f.x.rows, bc);
    CostSpec costs = costs_from_labels(f.labels);

    SUBCASE("a single-candidate grid returns that candidate") {
        std::vector<PenaltySpec> grid{{0.0, 0.01}};
        TuneResult r = grid_search(f.x, f.labels, ModelFamily::ridge, grid, costs, plan);
        CHECK(r.best.lambda == 0.01);
        REQUIRE(r.scores.size() == 1);
        CHECK(r.threshold >= 0.0);
        CHECK(r.threshold <= 1.0);
        CHECK(r.threshold ==
              doctest::Approx(std::accumulate(r.per_block_thresholds.begin(),
                                              r.per_block_thresholds.end(), 0.0) /
                              r.per_block_thresholds.size()));
    }
    SUBCASE("a slope-killing penalty loses to the unpenalized fit on predictive data") {
        // At the huge L1 weight every slope is exactly zero, so the candidate
        // ranks nothing and its validation cost must exceed the fitted model's.
        std::vector<PenaltySpec> grid{{1.0, 0.0}, {1.0, 1e4}};
        TuneResult r = grid_search(f.x, f.labels, ModelFamily::lasso, grid, costs, plan);
        CHECK(r.best.lambda == 0.0);
        REQUIRE(r.scores.size() == 2);
        CHECK(r.scores[0].second < r.scores[1].second);
    }
    SUBCASE("deterministic across repeated runs and worker counts") {
        GridConfig gc;
        gc.lambda_count = 12;
        auto grid = penalty_grid(ModelFamily::lasso, gc);
        TuneOptions serial;
        serial.workers = 1;
        TuneOptions parallel;
        parallel.workers = 4;
        TuneResult a = grid_search(f.x, f.labels, ModelFamily::lasso, grid, costs, plan, serial);
        TuneResult b = grid_search(f.x, f.labels, ModelFamily::lasso, grid, costs, plan, parallel);
        CHECK(a.best.lambda == b.best.lambda);
        CHECK(a.threshold == b.threshold);
        REQUIRE(a.scores.size() == b.scores.size());
        for (std::size_t i = 0; i < a.scores.size(); ++i)
            CHECK(a.scores[i].second == b.scores[i].second);
    }
    SUBCASE("tune trace rows cover candidate x usable block and export to csv") {
        std::vector<PenaltySpec> grid{{0.0, 0.0}, {0.0, 0.5}};
        std::vector<TuneTraceRow> trace;
        TuneOptions opts;
        opts.trace = &trace;
        TuneResult r = grid_search(f.x, f.labels, ModelFamily::ridge, grid, costs, plan, opts);
        CHECK(trace.size() == grid.size() * r.per_block_thresholds.size());

        auto path = std::filesystem::temp_directory_path() / "recast_tune_trace.csv";
        write_tune_trace(trace, grid, path);
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header == "candidate,alpha,lambda,block,validation_cost,threshold");
        std::size_t lines = 0;
        for (std::string line; std::getline(in, line);) ++lines;
        CHECK(lines == trace.size());
        std::filesystem::remove(path);
    }
    SUBCASE("single-class validation blocks are skipped") {
        // Positives live only inside the first block (train and validation);
        // the later blocks are single-class and must be excluded, not fatal.
        CvFixture g = make_cv_fixture(140);
        for (std::size_t r = 0; r < g.labels.size(); ++r)
            g.labels[r] = (r >= 10 && r <= 30) || (r >= 55 && r <= 60) ? 1.0 : 0.0;
        BlockPlan p2 = make_blocks(140, {.block_len = 70, .step = 35, .train_fraction = 0.7});
        std::vector<PenaltySpec> grid{{0.0, 0.1}};
        TuneResult r = grid_search(g.x, g.labels, ModelFamily::ridge, grid,
                                   CostSpec{1.0, 1.0}, p2);
        CHECK(r.per_block_thresholds.size() == 1);   // only the first block usable
    }
    SUBCASE("alternative selection metrics run deterministically") {
        GridConfig gc;
        gc.lambda_count = 5;
        auto grid = penalty_grid(ModelFamily::ridge, gc);
        for (SelectionMetric metric :
             {SelectionMetric::auprc, SelectionMetric::log_loss}) {
            TuneOptions opts;
            opts.metric = metric;
            TuneResult a = grid_search(f.x, f.labels, ModelFamily::ridge, grid, costs, plan, opts);
            TuneResult b = grid_search(f.x, f.labels, ModelFamily::ridge, grid, costs, plan, opts);
            CHECK(a.best.lambda == b.best.lambda);
            CHECK(a.threshold == b.threshold);
            CHECK(a.threshold >= 0.0);
            CHECK(a.threshold <= 1.0);
        }
    }
    SUBCASE("tuning errors out when every block is single-class") {
        CvFixture g = make_cv_fixture(140);
        for (auto& v : g.labels) v = 0.0;
        std::vector<PenaltySpec> grid{{0.0, 0.1}};
        CHECK_THROWS_AS(
            grid_search(g.x, g.labels, ModelFamily::ridge, grid, CostSpec{1, 1},
                        make_blocks(140, {.block_len = 100, .step = 20, .train_fraction = 0.75})),
            ValidationError);
    }
}
