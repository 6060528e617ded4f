#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "printed_tables.hpp"
#include "spillover/connectedness.hpp"
#include "spillover/error.hpp"
#include "spillover/io.hpp"

using namespace spillover;
namespace t = spillover::testing;

namespace {

std::vector<std::string> labels(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

FevdTable table(const Eigen::MatrixXd& shares) { return fevd_from_shares(labels(shares.rows()), shares); }

Date day(int offset) { return std::chrono::sys_days{std::chrono::year{2023} / 1 / 2} + std::chrono::days{offset}; }

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("connectedness") {
  TEST_CASE("identity decomposition has no spillovers") {
    const auto r = connectedness_report(table(Eigen::MatrixXd::Identity(3, 3)));
    CHECK(r.tci == 0.0);
    CHECK(r.net.isZero());
    CHECK(r.npdc.isZero());
    CHECK(r.pci.isZero());
    CHECK(r.inc_own.isApprox(Eigen::VectorXd::Constant(3, 100.0)));
    CHECK(std::isnan(r.pii(0, 1)));
    CHECK(r.npt == std::vector<int>{0, 0, 0});
    CHECK_THROWS_WITH_AS(pii(table(Eigen::MatrixXd::Identity(3, 3)), 0, 1), doctest::Contains("no pairwise linkage"),
                         DataError);
  }

  TEST_CASE("uniform decomposition") {
    const auto r = connectedness_report(table(Eigen::MatrixXd::Constant(4, 4, 0.25)));
    CHECK(r.tci == doctest::Approx(75.0));
    CHECK(r.net.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.pci(0, 1) == doctest::Approx(0.5));
    CHECK(r.pii(2, 3) == 0.0);
  }

  TEST_CASE("pairwise measures on the published static table") {
    const auto printed = t::printed_tables().front();
    const auto f = t::as_fevd(printed);
    const auto i = 0, j = 1;  // SIVB, SI
    CHECK(npdc(f, i, j) == doctest::Approx(1.19).epsilon(1e-9));
    CHECK(npdc(f, i, j, NpdcSign::literal) == doctest::Approx(-1.19).epsilon(1e-9));
    CHECK(pci(f, i, j) == doctest::Approx(11.15 / 73.47).epsilon(1e-12));
    CHECK(std::abs(pci(f, i, j) - 0.1518) < 5e-5);
    CHECK(std::abs(pii(f, i, j) + 0.1067) < 5e-5);
    CHECK(pii(f, i, j) == doctest::Approx(-pii(f, j, i)));
  }

  TEST_CASE("published marginals are reproduced from the printed cells") {
    for (const auto& printed : t::printed_tables()) {
      CAPTURE(printed.label);
      const auto r = connectedness_report(t::as_fevd(printed));
      CHECK((r.receiver - printed.receiver).cwiseAbs().maxCoeff() < 0.06);
      CHECK(std::abs(r.tci - printed.tci) < 0.06);
      if (printed.label.rfind("static", 0) != 0) {
        CHECK((r.giver - printed.giver).cwiseAbs().maxCoeff() < 0.06);
        CHECK((r.inc_own - printed.inc_own).cwiseAbs().maxCoeff() < 0.06);
        CHECK((r.net - printed.net).cwiseAbs().maxCoeff() < 0.06);
        CHECK(r.npt == printed.npt);
      }
    }
  }

  TEST_CASE("static table inconsistency is confined to one cell") {
    const auto printed = t::printed_tables().front();
    const auto n = static_cast<Eigen::Index>(printed.names.size());
    const auto sofr = n - 2, epu = n - 1;
    const auto r = connectedness_report(t::as_fevd(printed));
    // The EPU giver column disagrees by exactly the SOFR-row cell error.
    const double gap = printed.giver(epu) - r.giver(epu);
    CHECK(std::abs(gap - (0.42 - 2.09)) < 0.06);
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != epu) CHECK(std::abs(r.giver(k) - printed.giver(k)) < 0.06);
    // With the corrected cell every marginal matches.
    auto fixed = t::as_fevd(printed);
    fixed.shares(sofr, epu) = 0.0042;
    const auto c = connectedness_report(fixed);
    CHECK((c.giver - printed.giver).cwiseAbs().maxCoeff() < 0.06);
    CHECK((c.inc_own - printed.inc_own).cwiseAbs().maxCoeff() < 0.06);
    CHECK((c.net - printed.net).cwiseAbs().maxCoeff() < 0.06);
    // The printed NPT row sums to 53 although 11 variables form 55 pairs; the
    // cells give ZION 8 dominated counterparties where 6 is printed.
    const auto zion = std::find(printed.names.begin(), printed.names.end(), "ZION") - printed.names.begin();
    CHECK(std::accumulate(printed.npt.begin(), printed.npt.end(), 0) == 53);
    CHECK(std::accumulate(c.npt.begin(), c.npt.end(), 0) == 55);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto u = static_cast<std::size_t>(k);
      CHECK(c.npt[u] == (k == zion ? 8 : printed.npt[u]));
    }
    CHECK(std::abs(printed.receiver(sofr) - 100.0 * (1.0 - fixed.shares(sofr, sofr))) < 0.01);
  }

  TEST_CASE("invariants on random decompositions") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 2 + rep % 6;
      const auto f = table(t::random_row_stochastic(rng, n));
      const auto r = connectedness_report(f);
      CHECK(r.tci >= 0.0);
      CHECK(r.tci < 100.0);
      CHECK(std::abs(r.net.sum()) < 1e-9);
      CHECK((r.npdc + r.npdc.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(r.npdc.diagonal().isZero());
      CHECK(r.pci.minCoeff() >= 0.0);
      CHECK(r.pci.maxCoeff() <= 1.0);
      CHECK((r.pci - r.pci.transpose()).cwiseAbs().maxCoeff() == 0.0);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (i != j && !std::isnan(r.pii(i, j))) {
            CHECK(std::abs(r.pii(i, j)) <= 1.0);
            CHECK(r.pii(i, j) == doctest::Approx(-r.pii(j, i)));
          }
      CHECK((r.inc_own - r.net).isApprox(Eigen::VectorXd::Constant(n, 100.0)));

      // Relabeling the variables permutes every index consistently.
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.rbegin(), perm.rend(), 0);
      Eigen::MatrixXd ps(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ps(i, j) = f.shares(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      const auto q = connectedness_report(table(ps));
      CHECK(std::abs(q.tci - r.tci) < 1e-10);
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(q.net(i) - r.net(perm[static_cast<std::size_t>(i)])) < 1e-10);
        CHECK(q.npt[static_cast<std::size_t>(i)] == r.npt[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      }
    }
  }

  TEST_CASE("argument checks") {
    const auto f = table(Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS(npdc(f, 0, 0), ParameterError);
    CHECK_THROWS_AS(pci(f, 0, 2), ParameterError);
    CHECK_THROWS_AS(connectedness_report(table(Eigen::MatrixXd::Identity(1, 1))), DataError);
    CHECK_THROWS_AS(parse_pair_measure("tci"), ParameterError);
    const auto r = connectedness_report(f);
    CHECK_THROWS_AS(r.index_of("missing"), ParameterError);
    CHECK_THROWS_AS(export_network(r, -1.0), ParameterError);
  }

  TEST_CASE("network export") {
    CHECK(count(export_network(connectedness_report(table(Eigen::MatrixXd::Identity(3, 3))), 0.5), "->") == 0);
    const Eigen::MatrixXd s = (Eigen::MatrixXd(3, 3) << 0.6, 0.3, 0.1, 0.1, 0.8, 0.1, 0.05, 0.05, 0.9).finished();
    const auto f = fevd_from_shares({"a", "b", "c"}, s);
    for (auto sign : {NpdcSign::dominance, NpdcSign::literal}) {
      const auto dot = export_network(connectedness_report(f, sign), 0.0);
      CHECK(count(dot, "->") == 3);
      // b dominates a by 20 points, c dominates both a and b by 5.
      CHECK(dot.find("\"b\" -> \"a\" [weight=20.0000") != std::string::npos);
      CHECK(dot.find("\"c\" -> \"a\" [weight=5.0000") != std::string::npos);
      CHECK(dot.find("\"c\" -> \"b\"") != std::string::npos);
      CHECK(dot.find("\"c\" [class=\"giver\"") != std::string::npos);
      CHECK(dot.find("\"a\" [class=\"receiver\"") != std::string::npos);
    }
    const auto dot = export_network(connectedness_report(f), 10.0);
    CHECK(count(dot, "->") == 1);
  }

  TEST_CASE("dynamic reports") {
    std::mt19937_64 rng(5);
    FevdSeries series;
    for (int d = 0; d < 30; ++d) {
      series.dates.push_back(day(d));
      series.tables.push_back(table(t::random_row_stochastic(rng, 4)));
    }
    const auto serial = dynamic_report(series);
    const auto parallel = dynamic_report(series, NpdcSign::dominance, 4);
    CHECK(serial.tci_series() == parallel.tci_series());
    const auto one = connectedness_report(series.tables[7]);
    CHECK(serial.tci_series()[7] == one.tci);
    CHECK(serial.net_series("v2")[7] == one.net(2));
    CHECK(serial.pair_series("v0", "v3", PairMeasure::pci)[7] == one.pci(0, 3));
    CHECK_THROWS_AS(serial.pair_series("v1", "v1", PairMeasure::npdc), ParameterError);

    FevdSeries constant;
    for (int d = 0; d < 5; ++d) {
      constant.dates.push_back(day(d));
      constant.tables.push_back(series.tables[0]);
    }
    const auto flat = dynamic_report(constant).tci_series();
    CHECK(std::all_of(flat.begin(), flat.end(), [&](double v) { return v == flat.front(); }));
    CHECK_THROWS_AS(dynamic_report(FevdSeries{}), DataError);
  }

  TEST_CASE("report rendering") {
    const Eigen::MatrixXd s = (Eigen::MatrixXd(2, 2) << 0.75, 0.25, 0.5, 0.5).finished();
    const auto r = connectedness_report(fevd_from_shares({"a", "b"}, s));
    std::ostringstream tab;
    write_report_table(tab, r);
    const std::string text = tab.str();
    CHECK(text.find("Receiver") != std::string::npos);
    CHECK(text.find("Inc.Own") != std::string::npos);
    CHECK(text.find("TCI") != std::string::npos);
    CHECK(text.find("37.50") != std::string::npos);

    FevdSeries series{{day(0), day(1)}, {fevd_from_shares({"a", "b"}, s), fevd_from_shares({"a", "b"}, s)}};
    const auto dyn = dynamic_report(series);
    std::ostringstream lf, pair, net;
    write_dynamic_long_csv(lf, dyn);
    CHECK(lf.str().rfind("date,measure,i,j,value\n", 0) == 0);
    CHECK(lf.str().find("2023-01-02,tci,,,37.5\n") != std::string::npos);
    CHECK(lf.str().find("2023-01-03,npdc,a,b,25\n") != std::string::npos);
    write_pair_csv(pair, dyn, "a", "b", PairMeasure::pii);
    CHECK(pair.str() == "date,pii\n2023-01-02,-0.3333333333333333\n2023-01-03,-0.3333333333333333\n");
    write_net_csv(net, dyn);
    CHECK(net.str().rfind("date,a,b\n2023-01-02,25,-25\n", 0) == 0);
    const auto j = to_json(r);
    CHECK(j.at("tci").get<double>() == 37.5);
  }
}
