"""Paquete de tests para el sistema de scraping UPQ."""
