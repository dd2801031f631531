#include "dml/digest.hpp"
#include "dml/xml.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

struct Invocation
{
	int status = -1;
	std::string out;
	std::string err;
};

std::string shellQuote(const std::string &s)
{
	std::string q = "'";
	for (char c : s)
		q += c == '\'' ? std::string("'\\''") : std::string(1, c);
	return q + "'";
}

Invocation invoke(const dmltest::TempDir &dir, const std::vector<std::string> &args, const std::string &env = {})
{
	std::string cmd = "cd " + shellQuote(dir.path().string()) + " && " + env + " " + shellQuote(DML_CLI);
	for (auto &a : args)
		cmd += " " + shellQuote(a);
	cmd += " >" + shellQuote((dir / ".stdout").string()) + " 2>" + shellQuote((dir / ".stderr").string());
	int raw = std::system(cmd.c_str());
	Invocation result;
	result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
	result.out = dml::readFile(dir / ".stdout");
	result.err = dml::readFile(dir / ".stderr");
	return result;
}

std::string fixture(const std::string &name)
{
	return (dmltest::fixtures() / name).string();
}

} // namespace

TEST(Cli, ApplyUsageExample)
{
	dmltest::TempDir dir;
	auto before = dml::sha256File(fixture("usage/before.xml"));
	auto r = invoke(dir, { "apply", "--doc", fixture("usage/before.xml"), "--script", fixture("usage/usage.dml"), "--out", "out.xml" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_EQ(r.out, "4 commands applied, 0 failed\n");
	auto out = dml::loadXmlFile(dir / "out.xml").document;
	EXPECT_TRUE(dml::treeEqual(out, dml::loadXmlFile(fixture("usage/after.xml")).document, { true }));
	EXPECT_EQ(dml::sha256File(fixture("usage/before.xml")), before);
}

TEST(Cli, CheckEmptyAndBad)
{
	dmltest::TempDir dir;
	dml::writeFile(dir / "empty.dml", "");
	dml::writeFile(dir / "bad.dml", "RETAG 351795\n");

	auto r = invoke(dir, { "check", "empty.dml" });
	EXPECT_EQ(r.status, 0);
	EXPECT_EQ(r.out, "0 commands\n");

	r = invoke(dir, { "check", "bad.dml" });
	EXPECT_EQ(r.status, 1);
	EXPECT_NE(r.err.find("bad.dml:1: RETAG expects 2 arguments"), std::string::npos) << r.err;

	r = invoke(dir, { "--format", "json", "check", "bad.dml" });
	EXPECT_EQ(r.status, 1);
	auto j = json::parse(r.err);
	EXPECT_EQ(j["error"]["file"], "bad.dml");
	EXPECT_EQ(j["error"]["line"], 1);
	EXPECT_EQ(j["error"]["kind"], "domain");
}

TEST(Cli, CheckAgainstDocumentDoesNotMutate)
{
	dmltest::TempDir dir;
	dml::writeFile(dir / "s.dml", "RETAG 351795 TR\nRETAG 999 X\n");
	auto digest = dml::sha256File(fixture("usage/before.xml"));
	auto r = invoke(dir, { "check", "s.dml", "--doc", fixture("usage/before.xml") });
	EXPECT_EQ(r.status, 1);
	EXPECT_EQ(r.out, "2 commands, 1 unresolved\n");
	EXPECT_NE(r.err.find("s.dml:2:"), std::string::npos) << r.err;
	EXPECT_EQ(dml::sha256File(fixture("usage/before.xml")), digest);
}

TEST(Cli, UsageErrors)
{
	dmltest::TempDir dir;
	auto r = invoke(dir, { "apply", "--frobnicate" });
	EXPECT_EQ(r.status, 2);
	EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
	EXPECT_TRUE(r.out.empty());

	r = invoke(dir, {});
	EXPECT_EQ(r.status, 2);

	r = invoke(dir, { "gen", "--doc", fixture("usage/before.xml"), "--out", "x.dml" });
	EXPECT_EQ(r.status, 2);
	EXPECT_NE(r.err.find("exactly one of --rules or --charmap"), std::string::npos) << r.err;

	r = invoke(dir, { "apply", "--doc", "missing.xml", "--script", fixture("usage/usage.dml"), "--out", "o.xml" });
	EXPECT_EQ(r.status, 2);
}

TEST(Cli, OutputMustDifferFromInput)
{
	dmltest::TempDir dir;
	fs::copy_file(fixture("usage/before.xml"), dir / "doc.xml");
	auto digest = dml::sha256File(dir / "doc.xml");
	auto r = invoke(dir, { "apply", "--doc", "doc.xml", "--script", fixture("usage/usage.dml"), "--out", "./doc.xml" });
	EXPECT_EQ(r.status, 2);
	EXPECT_NE(r.err.find("must differ"), std::string::npos) << r.err;
	EXPECT_EQ(dml::sha256File(dir / "doc.xml"), digest);
}

TEST(Cli, ApplyFailureNamesLine)
{
	dmltest::TempDir dir;
	dml::writeFile(dir / "s.dml", "# note\nRETAG nowhere TR\n");
	auto r = invoke(dir, { "apply", "--doc", fixture("usage/before.xml"), "--script", "s.dml", "--out", "o.xml" });
	EXPECT_EQ(r.status, 1);
	EXPECT_NE(r.err.find("s.dml:2:"), std::string::npos) << r.err;
}

TEST(Cli, GenRulesAndCharmap)
{
	dmltest::TempDir dir;
	auto r = invoke(dir, { "gen", "--doc", fixture("usage/before.xml"), "--rules", std::string(DML_RULES_DIR) + "/usage-to-trans.json", "--out", "g.dml" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_EQ(r.out, "4 commands generated\n");
	EXPECT_NE(dml::readFile(dir / "g.dml").find("RETAG 351795 TR"), std::string::npos);

	dml::writeFile(dir / "map.json", R"({"ü":"u"})");
	r = invoke(dir, { "gen", "--doc", fixture("usage/before.xml"), "--charmap", "map.json", "--tags", "PRON,ORTH", "--out", "c.dml" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_EQ(dml::readFile(dir / "c.dml"), "# generated rule=charmap match=351785\nSET Text 351785 \"tur'fah\"\n");
}

TEST(Cli, RunAuditAndRollback)
{
	dmltest::TempDir dir;
	json manifest{ { "sourceXml", fixture("usage/before-compact.xml") },
				   { "outputXml", "out.xml" },
				   { "stages", json::array({ { { "name", "usage" }, { "kind", "manual" }, { "path", fixture("usage/usage.dml") } } }) } };
	dml::writeFile(dir / "m.json", manifest.dump());

	auto r = invoke(dir, { "run", "--manifest", "m.json" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_NE(r.out.find("manual 4, generated 0"), std::string::npos) << r.out;

	r = invoke(dir, { "audit", "history", "--run", "work", "--id", "351795" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_NE(r.out.find("RETAG 351795 TR"), std::string::npos) << r.out;
	EXPECT_NE(r.out.find("# ABC 5/27/2011"), std::string::npos) << r.out;

	r = invoke(dir, { "--format", "json", "audit", "history", "--run", "work", "--id", "351794", "--descendants" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_EQ(json::parse(r.out)["entries"].size(), 4u);

	r = invoke(dir, { "audit", "stats", "--run", "work", "--format", "json" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_EQ(json::parse(r.out)["totals"]["manual"], 4);

	r = invoke(dir, { "run", "--manifest", "m.json", "--exclude-command", fixture("usage/usage.dml") + ":3" });
	EXPECT_EQ(r.status, 0) << r.err;
	auto out = dml::loadXmlFile(dir / "out.xml").document;
	EXPECT_EQ(out.find("351795")->tag(), "USG");

	r = invoke(dir, { "run", "--manifest", "m.json", "--exclude-command", "nocolon" });
	EXPECT_EQ(r.status, 2);

	r = invoke(dir, { "audit", "stats", "--run", "nowhere" });
	EXPECT_EQ(r.status, 2);
}

TEST(Cli, WorkDirFromEnvironment)
{
	dmltest::TempDir dir;
	json manifest{ { "sourceXml", fixture("usage/before-compact.xml") }, { "outputXml", "out.xml" }, { "stages", json::array() } };
	dml::writeFile(dir / "m.json", manifest.dump());
	auto r = invoke(dir, { "run", "--manifest", "m.json" }, "DML_WORKDIR=elsewhere");
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_TRUE(fs::exists(dir / "elsewhere" / "LATEST"));
	EXPECT_FALSE(fs::exists(dir / "work"));
}

TEST(Cli, DiffReproducesTarget)
{
	dmltest::TempDir dir;
	auto r = invoke(dir, { "diff", fixture("usage/before-compact.xml"), fixture("usage/after-compact.xml"), "--out", "d.dml" });
	EXPECT_EQ(r.status, 0) << r.err;
	r = invoke(dir, { "apply", "--doc", fixture("usage/before-compact.xml"), "--script", "d.dml", "--out", "o.xml" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_TRUE(dml::treeEqual(dml::loadXmlFile(dir / "o.xml").document, dml::loadXmlFile(fixture("usage/after-compact.xml")).document));
}

TEST(Cli, GlobalOptions)
{
	dmltest::TempDir dir;
	dml::writeFile(dir / "k.xml", R"(<A key="1"><B key="2" ID="x"/><C/></A>)");
	dml::writeFile(dir / "s.dml", "RETAG 2 D\n");
	auto r = invoke(dir, { "--id-attr", "key", "--assign-missing-ids", "--pretty", "apply", "--doc", "k.xml", "--script", "s.dml", "--out", "o.xml" });
	EXPECT_EQ(r.status, 0) << r.err;
	EXPECT_EQ(dml::readFile(dir / "o.xml"), "<A key=\"1\">\n  <D key=\"2\" ID=\"x\"/>\n  <C key=\"gen-1\"/>\n</A>\n");
	EXPECT_NE(r.err.find("assigned id gen-1"), std::string::npos) << r.err;
}
