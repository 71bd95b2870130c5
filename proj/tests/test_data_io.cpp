#include <filesystem>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include <ogp/csv.hpp>
#include <ogp/metrics.hpp>
#include <ogp/normalize.hpp>
#include <ogp/results.hpp>

using namespace ogp;

namespace {

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

ResultRecord sample_record()
{
    ResultRecord r;
    r.command = "online-eval";
    r.benchmark = "van-der-pol";
    r.criterion = "mll";
    r.accept = true;
    r.seed = 7;
    r.budget = 100;
    r.err_threshold = 0.005;
    r.size = 100;
    r.initial_smse = 0.1 + 0.2; // not exactly representable in short decimal form
    r.smse = 1.0 / 3.0;
    r.mean_variance = 2.5e-7;
    r.streamed = 900;
    r.revised = 211;
    r.accepted = 111;
    r.replaced = 111;
    r.acceptance_pct = 61.66666666666667;
    r.complexity = "N^3/6 + N^2, with comma";
    return r;
}

} // namespace

TEST(Csv, ThreeRowsTwoFeatures)
{
    const TabularDataset t = parse_csv_dataset("a,b,target\n1,2,3\n4,5,6\n7,8,9\n", "target");
    EXPECT_EQ(t.rows.rows(), 3);
    EXPECT_EQ(t.rows.cols(), 2);
    EXPECT_EQ(t.feature_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.targets, (Vector(3) << 3, 6, 9).finished());
    EXPECT_EQ(t.rows(2, 1), 8.0);
    EXPECT_EQ(t.provenance.checksum.size(), 16u);
}

TEST(Csv, TargetColumnInTheMiddle)
{
    const TabularDataset t = parse_csv_dataset("a,y,b\r\n1,2,3\r\n", "y");
    EXPECT_EQ(t.feature_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.targets[0], 2.0);
    EXPECT_EQ(t.rows(0, 1), 3.0);
}

TEST(Csv, NonNumericCellNamesRowAndColumn)
{
    try {
        parse_csv_dataset("a,b,target\n1,2,3\n4,oops,6\n", "target");
        FAIL() << "expected IngestionError";
    }
    catch (const IngestionError& e) {
        EXPECT_EQ(e.row(), 3);
        EXPECT_EQ(e.column(), 2);
        EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos);
    }
}

TEST(Csv, MissingColumnAndEmptyFile)
{
    EXPECT_THROW(parse_csv_dataset("a,b\n1,2\n", "target"), IngestionError);
    EXPECT_THROW(parse_csv_dataset("", "target"), IngestionError);
    EXPECT_THROW(parse_csv_dataset("a,target\n1,2,3\n", "target"), IngestionError);
    EXPECT_THROW(load_csv_dataset(temp_path("ogp_does_not_exist.csv"), "target"), IngestionError);
}

TEST(Csv, MissingValuesRejectedAndCounted)
{
    const TabularDataset t = parse_csv_dataset("a,target\n1,2\nNA,3\n4,\n5,6\n", "target");
    EXPECT_EQ(t.rows.rows(), 2);
    EXPECT_EQ(t.rejected_rows, 2);
    EXPECT_TRUE(t.rows.allFinite());
}

TEST(Csv, BostonShapedFile)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::string text;
    for (int c = 0; c < 13; ++c)
        text += "f" + std::to_string(c) + ",";
    text += "MEDV\n";
    for (int r = 0; r < 506; ++r) {
        for (int c = 0; c < 14; ++c)
            text += format_double(u(rng)) + (c == 13 ? "\n" : ",");
    }
    const std::string path = temp_path("ogp_boston_shaped.csv");
    write_text_file(path, text);
    const TabularDataset t = load_csv_dataset(path, "MEDV");
    std::filesystem::remove(path);
    EXPECT_EQ(t.rows.rows(), 506);
    EXPECT_EQ(t.rows.cols(), 13);
    EXPECT_EQ(t.provenance.path, path);
}

TEST(Csv, DatasetWriteReadIsLossless)
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix x(20, 3);
    Vector y(20);
    for (Index i = 0; i < 20; ++i) {
        for (Index c = 0; c < 3; ++c)
            x(i, c) = z(rng) * 1e3;
        y[i] = z(rng) * 1e-7;
    }
    const Dataset d(x, y);
    const TabularDataset t = parse_csv_dataset(format_dataset_csv(d, default_feature_names(3), "y"), "y");
    EXPECT_TRUE(same_contents(t.to_dataset(), d));
}

TEST(Csv, QuotedCells)
{
    const auto cells = detail::split_csv_line(R"("a,b",c,"say ""hi""")");
    EXPECT_EQ(cells, (std::vector<std::string>{"a,b", "c", "say \"hi\""}));
    EXPECT_EQ(detail::csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(detail::csv_escape("plain"), "plain");
}

TEST(Normalize, TrainingSetHasZeroMeanUnitStd)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(5.0, 3.0);
    Matrix x(50, 3);
    Vector y(50);
    for (Index i = 0; i < 50; ++i) {
        for (Index c = 0; c < 3; ++c)
            x(i, c) = z(rng) * static_cast<double>(c + 1);
        y[i] = z(rng);
    }
    const Dataset d(x, y);
    const NormalizationStats s = normalize_fit(d, "train");
    const Dataset n = normalize_apply(s, d);
    for (Index c = 0; c < 3; ++c) {
        const auto col = n.inputs().col(c).array();
        EXPECT_NEAR(col.mean(), 0.0, 1e-10);
        EXPECT_NEAR(std::sqrt((col - col.mean()).square().mean()), 1.0, 1e-10);
    }
    EXPECT_NEAR(n.targets().mean(), 0.0, 1e-12);
    EXPECT_EQ(s.fitted_on, "train");
    const Dataset back = denormalize(s, n);
    for (Index i = 0; i < 50; ++i) {
        for (Index c = 0; c < 3; ++c)
            EXPECT_NEAR(back.inputs()(i, c), x(i, c), 1e-12 * std::abs(x(i, c)) + 1e-15);
        EXPECT_NEAR(back.target(i), y[i], 1e-12 * std::abs(y[i]) + 1e-15);
    }
}

TEST(Normalize, SingleRowApply)
{
    Matrix x(2, 2);
    x << 0.0, 10.0, 2.0, 30.0;
    const NormalizationStats s = normalize_fit(Dataset(x, Vector::Zero(2)));
    Matrix one(1, 2);
    one << 5.0, 5.0;
    const Dataset n = normalize_apply(s, Dataset(one, Vector::Constant(1, 4.0)));
    EXPECT_DOUBLE_EQ(n.inputs()(0, 0), (5.0 - 1.0) / 1.0);
    EXPECT_DOUBLE_EQ(n.inputs()(0, 1), (5.0 - 20.0) / 10.0);
    EXPECT_DOUBLE_EQ(n.target(0), 4.0);
}

TEST(Normalize, ConstantColumnNamed)
{
    Matrix x(3, 2);
    x << 1.0, 7.0, 2.0, 7.0, 3.0, 7.0;
    try {
        normalize_fit(Dataset(x, Vector::Zero(3)), "train", {"rooms", "tax"});
        FAIL() << "expected InvalidArgument";
    }
    catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("tax"), std::string::npos);
    }
}

TEST(Normalize, ValidationStatsDoNotLeak)
{
    Matrix a(3, 1), b(3, 1);
    a << 0.0, 1.0, 2.0;
    b << 100.0, 101.0, 102.0;
    const NormalizationStats s = normalize_fit(Dataset(a, Vector::Zero(3)), "train");
    const Dataset v = normalize_apply(s, Dataset(b, Vector::Zero(3)));
    EXPECT_GT(v.inputs().minCoeff(), 100.0);
}

TEST(Smse, MeanPredictorIsExactlyOne)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        Vector y(37);
        for (Index i = 0; i < 37; ++i)
            y[i] = z(rng) * 10.0 + 3.0;
        EXPECT_NEAR(smse(Vector::Constant(37, y.mean()), y), 1.0, 1e-12);
        EXPECT_EQ(smse(y, y), 0.0);
    }
}

TEST(Smse, FrozenAndWorseThanMean)
{
    const Vector p = (Vector(4) << 1.0, 2.5, 2.0, 4.5).finished();
    const Vector t = (Vector(4) << 1.2, 2.0, 2.9, 4.0).finished();
    EXPECT_NEAR(smse(p, t), 0.3105232892466935, 1e-14);
    EXPECT_GT(smse(-t, t), 1.0);
}

TEST(Smse, Errors)
{
    EXPECT_THROW(smse(Vector::Zero(3), Vector::Zero(2)), InvalidArgument);
    EXPECT_THROW(smse(Vector::Zero(3), Vector::Ones(3)), InvalidArgument);
    EXPECT_THROW(smse(Vector::Zero(1), Vector::Ones(1)), InvalidArgument);
}

TEST(Results, EmptyListIsHeaderOnlyCsv)
{
    const std::string text = format_results({}, ResultFormat::Csv);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    EXPECT_EQ(text.rfind("command,benchmark,criterion,accept,seed,budget,", 0), 0u);
    EXPECT_TRUE(parse_results(text, ResultFormat::Csv).empty());
    EXPECT_EQ(format_results({}, ResultFormat::Json), "[]\n");
}

TEST(Results, RoundTripBothFormats)
{
    ResultRecord empty;
    empty.command = "bench";
    const std::vector<ResultRecord> records{sample_record(), empty};
    for (auto fmt : {ResultFormat::Csv, ResultFormat::Json}) {
        const std::string path = temp_path(fmt == ResultFormat::Csv ? "ogp_results.csv" : "ogp_results.json");
        write_results(records, path, fmt);
        const auto back = read_results(path, fmt);
        std::filesystem::remove(path);
        EXPECT_EQ(back, records);
    }
}

TEST(Results, FormatFromExtension)
{
    EXPECT_EQ(result_format_for("a/b.json"), ResultFormat::Json);
    EXPECT_EQ(result_format_for("a/b.csv"), ResultFormat::Csv);
    EXPECT_EQ(result_format_for("noext"), ResultFormat::Csv);
}

TEST(Results, BadHeaderAndCellRejected)
{
    EXPECT_THROW(parse_results("command,nonsense\n", ResultFormat::Csv), IngestionError);
    std::string text = format_results({sample_record()}, ResultFormat::Csv);
    const auto pos = text.find(",true,");
    text.replace(pos, 6, ",maybe,");
    EXPECT_THROW(parse_results(text, ResultFormat::Csv), IngestionError);
}

TEST(Results, SweepEnumeration)
{
    // 3 thresholds x 3 criteria gives 9 rows with distinct keys
    std::vector<ResultRecord> records;
    for (double e : {0.001, 0.005, 0.01})
        for (const char* c : {"prior-entropy", "mean-relevance", "mll"}) {
            ResultRecord r = sample_record();
            r.err_threshold = e;
            r.criterion = c;
            records.push_back(r);
        }
    const auto back = parse_results(format_results(records, ResultFormat::Csv), ResultFormat::Csv);
    ASSERT_EQ(back.size(), 9u);
    std::set<std::pair<double, std::string>> keys;
    for (const auto& r : back)
        keys.emplace(*r.err_threshold, r.criterion);
    EXPECT_EQ(keys.size(), 9u);
}
