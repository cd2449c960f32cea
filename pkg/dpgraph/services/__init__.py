# Release mechanisms and graph utilities
