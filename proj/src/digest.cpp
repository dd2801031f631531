#include "dml/digest.hpp"
#include "dml/xml.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

namespace dml
{

std::string sha256Hex(std::string_view bytes)
{
	std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
	std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
	unsigned int len = 0;

	if (not ctx or EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 or
		EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 or
		EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
		throw std::runtime_error("SHA-256 computation failed");

	static const char hex[] = "0123456789abcdef";
	std::string result;
	result.reserve(len * 2);
	for (unsigned int i = 0; i < len; ++i)
	{
		result += hex[md[i] >> 4];
		result += hex[md[i] & 0xF];
	}
	return result;
}

std::string sha256File(const std::filesystem::path &file)
{
	return sha256Hex(readFile(file));
}

} // namespace dml
