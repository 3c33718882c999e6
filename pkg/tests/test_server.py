# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import pytest

import Central_Server as server


class TestTools:
    def test_encode_and_decode(self, pgm_file, tmp_path):
        stream = tmp_path / "image.gbtc"
        decoded = tmp_path / "decoded.pgm"
        encoded = server.encode_image_file(str(pgm_file), str(stream), qp=31, block_size=8, clusters=4)
        assert 'error' not in encoded
        assert encoded['rate_bpp'] > 0.0

        info = server.decode_image_file(str(stream), str(decoded))
        assert info['width'] == 64 and info['qp'] == 31
        assert info['transforms'] == 'dct+gbt'

        comparison = server.compare_images(str(pgm_file), str(decoded))
        assert comparison['psnr'] == pytest.approx(encoded['psnr'])

    def test_errors_come_back_as_dicts(self, pgm_file, tmp_path):
        assert 'error' in server.encode_image_file(str(tmp_path / "missing.pgm"), str(tmp_path / "x"))
        assert 'error' in server.encode_image_file(str(pgm_file), str(tmp_path / "x"), qp=99)
        assert 'error' in server.decode_image_file(str(pgm_file), str(tmp_path / "y.pgm"))
        assert 'error' in server.compare_images(str(pgm_file), str(tmp_path / "missing.pgm"))
        assert 'error' in server.compute_bd_rate(str(tmp_path / "a.csv"), str(tmp_path / "b.csv"))
        assert 'error' in server.run_pse_experiment(model='cauchy')

    def test_pse_experiment(self):
        result = server.run_pse_experiment(sizes=[4, 8], trials=2, seed=1)
        assert result['columns'] == ['training_size', 'dct', 'gbt', 'klt']
        assert [row[0] for row in result['rows']] == [4, 8]

    def test_generate_textures(self, tmp_path):
        result = server.generate_textures(str(tmp_path / "tex"), count=2, size=32, seed=0)
        assert result['count'] == 2
