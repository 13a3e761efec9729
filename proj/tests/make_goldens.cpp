// Regenerates the frozen golden files under tests/golden/ from the shared
// fixtures. Run on purpose only: a diff in its output is a behaviour change.

#include "fixtures.hpp"
#include "recast/preprocess.hpp"

#include <filesystem>
#include <iostream>

using namespace recast;

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_goldens <golden-dir>\n";
        return 1;
    }
    std::filesystem::path golden(argv[1]);
    std::filesystem::create_directories(golden);

    {
        VintageSnapshot snap = fixtures::make_snapshot(4, Month::parse("2003-05"), 80);
        DesignMatrix d = build_design(snap, 1);
        write_design(d, golden / "design_h1.csv");
        std::cout << "wrote design_h1.csv (" << d.x.rows << " rows)\n";
    }
    {
        std::filesystem::path tree =
            std::filesystem::temp_directory_path() / "recast_golden_tree";
        std::filesystem::remove_all(tree);
        ScenarioTruth truth = generate(fixtures::backtest_spec(24), tree);
        BacktestConfig cfg = fixtures::quick_config(ModelFamily::ridge, 1);
        BacktestResult res = run_backtest(tree, cfg);
        write_forecasts(res.records, golden / "forecasts_ridge_h1.csv");
        std::cout << "wrote forecasts_ridge_h1.csv (" << res.records.size() << " records)\n";

        std::vector<MetricsRow> rows;
        for (const auto& g : group_forecasts(res.records, truth.indicator))
            rows.push_back(evaluate_group(g));
        write_metrics_table(rows, golden / "metrics_ridge_h1.csv");
        std::cout << "wrote metrics_ridge_h1.csv (" << rows.size() << " rows)\n";
        std::filesystem::remove_all(tree);
    }
    return 0;
}
