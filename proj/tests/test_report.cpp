#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "support/temp_dir.hpp"
#include "unicrawl/errors.hpp"
#include "unicrawl/report.hpp"

using namespace unicrawl;
using testsupport::temp_dir;

namespace {

stage_stats stats(std::uint64_t in, std::uint64_t out, const std::string& name = "dedup") {
    stage_stats s;
    s.stage = name;
    s.bytes_in = in;
    s.bytes_out = out;
    return s;
}

} // namespace

TEST_CASE("reduction percentages") {
    CHECK(reduction_percent(stats(100'000'000, 40'000'000)) == doctest::Approx(60.0));
    CHECK(reduction_percent(stats(4'000'000'000, 600'000'000)) == doctest::Approx(85.0));
    CHECK(reduction_percent(stats(1234, 1234)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(reduction_percent(stats(0, 0)), config_error);
}

TEST_CASE("comparison ratios against prior datasets") {
    std::vector<prior_work_row> prior = {
        {"mC4", "amh", 1200}, {"Wikipedia", "amh", 20}, {"Equal", "amh", 4000}};
    auto rows = compare_with_prior(4000, prior);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].dataset == "mC4");
    CHECK(rows[0].ratio == doctest::Approx(3.33).epsilon(0.01));
    CHECK(rows[1].ratio == doctest::Approx(200.0));
    CHECK(rows[2].ratio == doctest::Approx(1.0));
}

TEST_CASE("bundled table carries the reference sizes") {
    auto rows = bundled_prior_works();
    auto find = [&](const std::string& ds, const std::string& lang) -> double {
        for (const auto& r : rows) {
            if (r.dataset == ds && r.language == lang) return r.size_mb;
        }
        return -1;
    };
    CHECK(find("OSCAR", "amh") == 380);
    CHECK(find("mC4", "amh") == 1200);
    CHECK(find("CC-100", "amh") == 130);
    CHECK(find("Wikipedia", "amh") == 20);
    CHECK(find("mC4", "snd") == 4000);
    CHECK(find("OSCAR", "hau") == -1); // unknown sizes stay absent
}

TEST_CASE("csv loading") {
    temp_dir dir;
    {
        std::ofstream f(dir.sub("prior.csv"));
        f << "dataset,language,size_mb\n";
        f << "# comment\n";
        f << "mC4,amh,1200\n";
        f << "Wikipedia,amh,20\n";
    }
    auto rows = load_prior_works_csv(dir.sub("prior.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].dataset == "mC4");
    CHECK(rows[1].size_mb == 20);
    CHECK_THROWS_AS(load_prior_works_csv(dir.sub("missing.csv")), config_error);
}

TEST_CASE("order-of-magnitude deviations warn, in-range values stay quiet") {
    pipeline_report report;
    report.target_language = "amh";
    archive_report a;
    a.crawl_id = "CC-MAIN-2023-14";
    a.stages.push_back(stats(250'000'000'000, 20'000'000, "index")); // 20 MB: expected
    a.stages.push_back([] {
        auto s = stats(3'500'000'000, 90'000'000, "fetch_extract");
        return s;
    }());
    a.stages.push_back(stats(90'000'000, 36'000'000, "dedup_archive")); // 60%: expected
    report.archives.push_back(a);
    CHECK(check_against_reference(report).empty());

    report.archives[0].stages[0] = stats(250'000'000'000, 900'000'000, "index"); // 900 MB
    auto warnings = check_against_reference(report);
    REQUIRE(!warnings.empty());
    CHECK(warnings[0].find("filtered index") != std::string::npos);
}

TEST_CASE("json and text reports render the same stats") {
    pipeline_report report;
    report.target_language = "amh";
    archive_report a;
    a.crawl_id = "CC-MAIN-2023-14";
    a.stages.push_back(stats(1000, 400, "dedup_archive"));
    a.skip_counts["http_status"] = 3;
    report.archives.push_back(a);
    report.final_size_mb = 12.5;
    report.comparisons.push_back({"mC4", 1200, 0.0104});
    report.warnings.push_back("example warning");

    std::string text = render_report_text(report);
    CHECK(text.find("CC-MAIN-2023-14") != std::string::npos);
    CHECK(text.find("-60.0%") != std::string::npos);
    CHECK(text.find("http_status=3") != std::string::npos);
    CHECK(text.find("example warning") != std::string::npos);

    auto j = nlohmann::json::parse(render_report_json(report));
    CHECK(j["target_language"] == "amh");
    CHECK(j["archives"][0]["stages"][0]["reduction_pct"] == doctest::Approx(60.0));
    CHECK(j["archives"][0]["skip_counts"]["http_status"] == 3);
    CHECK(j["final_size_mb"] == doctest::Approx(12.5));
    CHECK(j["warnings"].size() == 1);

    temp_dir dir;
    write_reports(report, dir.str());
    CHECK(std::ifstream(dir.sub("report.json")).good());
    CHECK(std::ifstream(dir.sub("report.txt")).good());
}
