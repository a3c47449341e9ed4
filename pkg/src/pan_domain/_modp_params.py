"""Fixed Schnorr-group constants for the modp backends.

Generated by tools/gen_modp_params.py; every modulus shares the same
256-bit prime subgroup order Q.
"""

Q = int(
    "b0df92bd6180caffddec1b516211b157efef2c1a8084443239a799574bc8b4ad",
    16,
)

P512 = int(
    "80000000000000000000000000000000000000000000000000000000000000f6"
    "5e774feffebdac9c93cfb3850eeb25db282381450b33e5d841b425cd5348c73d",
    16,
)

G512 = int(
    "4ff2812686f918a8f42f0417d0d10a62d3227784bb39473fa21eea3944893b55"
    "eee8a98b246268742d9f522131c2964bb0b2e413ecebab8d2264630447260d6",
    16,
)

P1024 = int(
    "8000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "000000000000000000000000000000000000000000000000000000000000002d"
    "a9d63247dfa8054fd1a7ba7faf54bdb2554ad06c024a27bbddfee5c4698b25b3",
    16,
)

G1024 = int(
    "7fb8be1821caa85c47656d0f086474b75d2a7b9886c912e01efd3c88abd01cc4"
    "12ba4319aa37df6062966fc5d8bdc3d33833db93896170963ae92ddaeff9411a"
    "0c70a0e6c2886e3542d07af8e5d9e159f6338093af971e58e8a3f2ae6d802204"
    "a79750b7b721177f1813eb4140e778e17280157f64a73fc28efcf2a4b67d2fc2",
    16,
)

P2048 = int(
    "8000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "000000000000000000000000000000000000000000000000000000000000077f"
    "853122d83018943a1bae8c7ae9ec6140dbaa4e60a6f3e58b32a68b53a3001c1b",
    16,
)

G2048 = int(
    "7ddcf715565c287737ea65eb8b3967161420aa40314fd59165f242d3010cc98c"
    "af4b2c7679168f26c12b6bb645d1147da6f411e233561fcc07210eebdb37b0ef"
    "ca9c553238ecce096b9a083ea0ac1d4dd0879dd5bfa6d88b62c627871ebf4e0f"
    "a784197c3e11aeb1ff3fbc8287b974e2d5fc2b2c837741b97c0bc969a8d51f50"
    "c0ff67aadaf0c58ef0d9d3ba162bc263e6cbf520ba34212b8c803c34bdec537d"
    "625782866ef2ca494d4db58ecd73ea8460baa6bb599842c055029f6cc9924e41"
    "57423d0e47f6f71e4855382bb54634357b522965ccfc5d9267e9ad62301bcb88"
    "9904fcfcb411e7eab3463cc2b2ad7541522de2c22d39f17e3229bbf5858e8ad3",
    16,
)

P4096 = int(
    "8000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000498"
    "9e9661d8975089ba8b0f921a52e83e11fbec176690024bc388d749562eaacf59",
    16,
)

G4096 = int(
    "24e91bf5476249b0d5c3821f50b59ab0516898275bcb724ea300b09cd867e8fa"
    "a1f1e268f3460a15aa9b0ccc0c81d3be1ead4fc5b45a95eacc381f296a08dfd0"
    "3bb75213b931d713a090e56e2e226e0b4c945ea25bede110906903aa8c47f1d0"
    "1fb4c3404ed0f2a74e5274da856ebce8da3db376e213abc6b62bcbe36bef7576"
    "a522230940afa2c1d7c81c144af755359a8b793639635c7dd365d026940ad2fa"
    "442240db3a5f187d92a9066a9fc6d2a325703c5eef64f0e50bde0ce5b0c4f2b6"
    "48e4f4880e2bf5864e2f1c9370ce096bd1503d8ea1f2272fa4bda1b712ef78e5"
    "dc45bad6e1666a2a160181cc5da5e5fed966ba16c749c3045d1d7d96f769b0b8"
    "d7d8654a3adbcf777c3547f598cdfea3203591659058d79fc9bf63825243f1b8"
    "4c6a2bcd16fd7f9d156b63d51b8d135a08c99c0022bcbf754a6fede124648798"
    "c08e1915eefd008e03f2ac3cd6c5debd84fe15184033e42877fe0ce796665d47"
    "3b377a9ee4f704ee20bc3a49f82c3eaf06366cb14cd52a66706e753c1b2c3693"
    "80e85bf8941d395007bead0882d876c3cce09f2ae978be735f30d715a82aa9f3"
    "0c2a8b599bda49b5b56b355b32b304452dbec96283cd254d14452f050a29766d"
    "361b3eab42eb72101415f84e8f95e071ca40ff4c06bd59cd07198dce81aa544b"
    "4c56a467bc1c3ec29f7dd2cf2495884ddde6a59299572ed00bcffe5db7e28cb9",
    16,
)
