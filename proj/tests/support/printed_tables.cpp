#include "printed_tables.hpp"

#include <sstream>

#include "spillover/error.hpp"

namespace spillover::testing {

namespace {

// Tab-separated exactly as printed, rounding and typography included.
constexpr const char* k_static_var = R"(	SIVB	SI	SBNY	FRC	WAL	PACW	CMA	ZION	VIX	SOFR	EPU	Receiver
SIVB	27.54	4.98	9.99	8.71	11.15	16.05	7.38	9.36	4.76	0.06	0.02	72.46
SI	6.17	34.78	16.72	4.15	6.94	7.02	5.87	5.9	11.66	0.38	0.42	65.22
SBNY	8.47	10.83	22.64	7.42	10.68	12.7	9.19	9.77	7.81	0.22	0.27	77.36
FRC	16.12	2.41	5.95	19.76	13.92	15.03	10.08	12.23	3.81	0.14	0.55	80.24
WAL	13.33	3.6	7.95	11.77	18.56	15.85	11.28	12.77	4.27	0.08	0.55	81.44
PACW	14.48	4.14	10.45	8.68	13.35	22.12	10.08	11.8	4.37	0.16	0.37	77.88
CMA	9.41	3.52	8.06	10.18	13.87	12.26	20.37	15.96	5.37	0.24	0.76	79.63
ZION	8.49	3.56	8.32	11.06	14.05	12.59	15.37	19.67	6.09	0.14	0.67	80.33
VIX	5.62	10.79	10.56	6.46	7.65	7.02	8.38	9.56	30.92	0.66	2.37	69.08
SOFR	0.37	0.63	0.99	0.18	0.18	0.54	0.86	0.5	3.4	91.93	2.09	8.07
EPU	0.38	0.97	1.37	1.63	2.05	1.14	1.82	1.35	2.22	2.09	84.97	15.03
Giver	82.83	45.42	80.36	70.23	93.85	100.21	80.31	89.18	53.77	4.17	6.41	
Inc.Own	110.37	80.2	103	89.99	112.41	122.33	100.68	108.85	84.69	96.1	91.38	TCI
NET	10.38	-19.8	3	-10.01	12.41	22.33	0.68	8.85	-15.31	-3.9	-8.62	64.25
NPT	7	2	5	6	8	10	5	6	2	1	1	)";

constexpr const char* k_tvp_vix = R"(	SIVB	SI	SBNY	FRC	WAL	PACW	CMA	ZION	VIX	Receiver
SIVB	27.77	6.34	10.75	8.95	11.7	12.32	8.53	7.66	5.99	72.23
SI	10.73	32.36	14.25	8.29	8.54	7.57	4.98	5.41	7.87	67.64
SBNY	14.54	12.23	15.81	7.82	12.55	15.5	9.42	7	5.13	84.19
FRC	8.97	3.76	5.19	34.85	11.72	7.11	6.77	9.11	12.52	65.15
WAL	12.89	5.33	10.1	11.82	14.86	13.51	12.57	12.68	6.23	85.14
PACW	13.73	6.34	13.81	7.84	14.82	13.8	14.01	10.6	5.05	86.2
CMA	10.3	3.5	9	10.12	15.09	14.39	15.18	15.4	7.02	84.82
ZION	10.12	3.43	7.11	12.2	15.4	11.48	15.28	15.33	9.65	84.67
VIX	6.12	8.03	4.65	17.73	8.08	4.22	5.09	10.2	35.87	64.13
Giver	87.4	48.97	74.87	84.77	97.9	86.09	76.67	78.06	59.45	694.18
Inc.Own	115.16	81.32	90.67	119.62	112.76	99.89	91.85	93.39	95.32	TCI
NET	15.16	-18.68	-9.33	19.62	12.76	-0.11	-8.15	-6.61	-4.68	77.13
NPT	8	1	2	7	6	4	2	3	3	)";

constexpr const char* k_tvp_sofr = R"(	SIVB	SI	SBNY	FRC	WAL	PACW	CMA	ZION	SOFR	Receivers
SIVB	28.73	6.6	11.16	9.06	12.03	12.74	8.84	7.91	2.94	71.27
SI	11.23	34.39	15.21	8.59	8.98	8	5.27	5.73	2.6	65.61
SBNY	14.67	12.53	16.3	7.73	12.74	15.82	9.62	7.15	3.45	83.7
FRC	9.65	4.2	5.71	38.86	12.89	7.72	7.45	10.1	3.42	61.14
WAL	13.27	5.57	10.53	12.13	15.44	14.04	13.1	13.2	2.73	84.56
PACW	13.88	6.46	14.11	7.83	15.06	14.09	14.26	10.79	3.52	85.91
CMA	10.55	3.64	9.33	10.33	15.57	14.9	15.71	15.97	4	84.29
ZION	10.68	3.7	7.62	12.95	16.42	12.29	16.42	16.51	3.41	83.49
SOFR	1.04	0.95	0.98	5	1.59	1.22	1.63	2.38	85.21	14.79
Giver	84.96	43.64	74.66	73.62	95.29	86.72	76.57	73.22	26.07	634.75
Inc.Own	113.69	78.03	90.95	112.49	110.73	100.81	92.28	89.73	111.29	TCI
NET	13.69	−21.97	−9.05	12.49	10.73	0.81	−7.72	−10.27	11.29	70.53
NPT	7	0	2	6	6	4	3	1	7	)";

constexpr const char* k_tvp_epu = R"(	SIVB	SI	SBNY	FRC	WAL	PACW	CMA	ZION	EPU	Receiver
SIVB	28.88	6.61	11.19	9.23	12.13	12.8	8.87	7.96	2.33	71.12
SI	11.14	34.08	15	8.52	8.92	7.93	5.2	5.66	3.54	65.92
SBNY	14.86	12.56	16.22	7.98	12.84	15.87	9.65	7.18	2.83	83.78
FRC	9.89	4.25	5.79	39.25	13.09	7.85	7.56	10.22	2.11	60.75
WAL	13.43	5.58	10.56	12.32	15.51	14.11	13.14	13.25	2.1	84.49
PACW	14.02	6.5	14.18	7.97	15.17	14.16	14.35	10.87	2.78	85.84
CMA	10.84	3.7	9.48	10.69	15.89	15.16	15.96	16.25	2.02	84.04
ZION	10.88	3.72	7.68	13.16	16.58	12.38	16.5	16.54	2.57	83.46
EPU	4.28	9.34	7.43	3.83	3.86	2.79	2.3	2.27	63.9	36.1
Giver	89.35	52.26	81.3	73.7	98.48	88.89	77.58	73.65	20.28	655.49
Inc.Own	118.23	86.34	97.53	112.95	113.99	103.05	93.54	90.2	84.18	TCI
NET	18.23	-13.66	-2.47	12.95	13.99	3.05	-6.46	-9.80	-15.82	72.83
NPT	8	1	3	6	7	5	4	1	1	)";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) out.push_back(field);
  return out;
}

double number(std::string text) {
  // Some tables print the Unicode minus sign.
  const std::string minus = "\xE2\x88\x92";
  for (auto pos = text.find(minus); pos != std::string::npos; pos = text.find(minus)) text.replace(pos, minus.size(), "-");
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw DataError("bad number '" + text + "'");
  return v;
}

}  // namespace

PrintedTable parse_printed_table(std::string label, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::getline(in, line);
  auto header = split_tabs(line);
  PrintedTable t;
  t.label = std::move(label);
  t.names.assign(header.begin() + 1, header.end() - 1);
  const auto N = static_cast<Eigen::Index>(t.names.size());
  t.cells.resize(N, N);
  t.receiver.resize(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    std::getline(in, line);
    const auto f = split_tabs(line);
    if (f.front() != t.names[static_cast<std::size_t>(i)]) throw DataError("row order differs from header");
    for (Eigen::Index j = 0; j < N; ++j) t.cells(i, j) = number(f[static_cast<std::size_t>(j + 1)]);
    t.receiver(i) = number(f[static_cast<std::size_t>(N + 1)]);
  }
  auto marginal = [&](const char* name, Eigen::VectorXd& target) {
    std::getline(in, line);
    const auto f = split_tabs(line);
    if (f.front() != name) throw DataError(std::string("expected row ") + name);
    target.resize(N);
    for (Eigen::Index j = 0; j < N; ++j) target(j) = number(f[static_cast<std::size_t>(j + 1)]);
    return f;
  };
  marginal("Giver", t.giver);
  marginal("Inc.Own", t.inc_own);
  const auto net = marginal("NET", t.net);
  t.tci = number(net.at(static_cast<std::size_t>(N + 1)));
  Eigen::VectorXd npt;
  marginal("NPT", npt);
  for (Eigen::Index j = 0; j < N; ++j) t.npt.push_back(static_cast<int>(npt(j)));
  return t;
}

std::vector<PrintedTable> printed_tables() {
  return {parse_printed_table("static VAR, 11 variables", k_static_var),
          parse_printed_table("TVP-VAR with VIX", k_tvp_vix),
          parse_printed_table("TVP-VAR with SOFR", k_tvp_sofr),
          parse_printed_table("TVP-VAR with EPU", k_tvp_epu)};
}

FevdTable as_fevd(const PrintedTable& table) {
  FevdTable f;
  f.names = table.names;
  f.shares = table.cells / 100.0;
  f.raw = f.shares;
  return f;
}

}  // namespace spillover::testing
